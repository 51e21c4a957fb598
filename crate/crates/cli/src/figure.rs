//! SVG figures: the source cage and payload on the left, the target cage
//! and the deformed payload on the right.

use std::fmt::Write;

use mvmap::{boundary_offset_curve, deform, self_intersections, BBox, DeformationJob, Payload, Point64, Polygon64};

use crate::scene::Scene;

const PANEL: f64 = 400.0;
const MARGIN: f64 = 36.0;
/// Offset of the stand-in curve drawn when a scene has no payload, as a
/// fraction of the source diameter.
const DEFAULT_CURVE_OFFSET: f64 = 0.08;
const DEFAULT_CURVE_SAMPLES: usize = 256;

#[derive(Debug, Clone)]
pub struct Figure {
    pub svg: String,
    /// Payload (or stand-in curve) before and after the mapping.
    pub curve: Vec<Point64>,
    pub image: Vec<Point64>,
    pub closed: bool,
    /// Properly crossing segment pairs of the image curve.
    pub image_crossings: Vec<(usize, usize)>,
}

/// Renders `scene` as an SVG document.
pub fn render(scene: &Scene) -> mvmap::Result<Figure> {
    let source = scene.pair.source();
    let target = scene.pair.target();
    let (payload, is_curve) = match &scene.payload {
        Some(p @ Payload::Polyline { .. }) => (p.clone(), true),
        Some(p) => (p.clone(), false),
        None => {
            let pts = boundary_offset_curve(source, DEFAULT_CURVE_OFFSET * source.diameter(), DEFAULT_CURVE_SAMPLES);
            (Payload::Polyline { points: pts, closed: true }, true)
        }
    };
    let closed = matches!(payload, Payload::Polyline { closed: true, .. });
    let curve = payload.points(source);
    let mut job = DeformationJob::new(scene.pair.clone(), payload);
    job.kind = scene.kind;
    job.tol = Some(scene.tol());
    let image = deform(&job)?;
    let image_crossings = if is_curve { self_intersections(&image, closed) } else { Vec::new() };

    let left = BBox::of(source.vertices());
    let right = BBox::of(target.vertices());
    let span = [left.width(), left.height(), right.width(), right.height()]
        .into_iter()
        .fold(0.0, f64::max);
    let scale = (PANEL - 2.0 * MARGIN) / span;
    let lview = View::new(&left, scale, 0.0);
    let rview = View::new(&right, scale, PANEL);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = 2.0 * PANEL,
        h = PANEL
    );
    svg.push_str(
        "<style>.cage{fill:#f4f4f4;stroke:#222;stroke-width:1.5}.curve{fill:none;stroke:#c0392b;stroke-width:1.2}\
         .label{font:13px sans-serif;fill:#222}.dot{fill:#c0392b}</style>\n",
    );
    let _ = writeln!(svg, r##"<rect width="{}" height="{}" fill="#fff"/>"##, 2.0 * PANEL, PANEL);

    for (name, poly, view) in [("source", source, &lview), ("target", target, &rview)] {
        let _ = writeln!(svg, r#"<g id="{name}">"#);
        let _ = writeln!(
            svg,
            r#"<path class="cage" id="{name}-cage" d="{}"/>"#,
            path_data(poly.vertices(), true, view)
        );
        labels(&mut svg, poly, view);
        let (pts, id) = if name == "source" { (&curve, "payload") } else { (&image, "image") };
        if is_curve {
            let _ = writeln!(svg, r#"<path class="curve" id="{id}" d="{}"/>"#, path_data(pts, closed, view));
        } else {
            for p in pts.iter() {
                let (x, y) = view.map(*p);
                let _ = writeln!(svg, r#"<circle class="dot" cx="{x:.3}" cy="{y:.3}" r="2"/>"#);
            }
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");

    Ok(Figure {
        svg,
        curve,
        image,
        closed,
        image_crossings,
    })
}

struct View {
    scale: f64,
    x0: f64,
    y0: f64,
}

impl View {
    fn new(bbox: &BBox<f64>, scale: f64, offset: f64) -> Self {
        let cx = 0.5 * (bbox.min.x + bbox.max.x);
        let cy = 0.5 * (bbox.min.y + bbox.max.y);
        Self {
            scale,
            x0: offset + 0.5 * PANEL - scale * cx,
            y0: 0.5 * PANEL + scale * cy,
        }
    }

    fn map(&self, p: Point64) -> (f64, f64) {
        (self.x0 + self.scale * p.x, self.y0 - self.scale * p.y)
    }
}

fn path_data(points: &[Point64], closed: bool, view: &View) -> String {
    let mut d = String::new();
    for (i, &p) in points.iter().enumerate() {
        let (x, y) = view.map(p);
        let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" });
    }
    if closed {
        d.push_str(" Z");
    }
    d
}

fn labels(svg: &mut String, poly: &Polygon64, view: &View) {
    let n = poly.len() as f64;
    let c = poly.vertices().iter().copied().sum::<Point64>() / n;
    for (i, &v) in poly.vertices().iter().enumerate() {
        let dir = v - c;
        let off = dir / dir.norm() * (14.0 / view.scale);
        let (x, y) = view.map(v + off);
        let _ = writeln!(
            svg,
            r#"<text class="label" x="{x:.3}" y="{y:.3}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
            i + 1
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvmap::MappingPair64;

    #[test]
    fn svg_has_one_path_per_polygon_and_curve() {
        let sq = Polygon64::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let q = Polygon64::from_coords(&[[0.0, 0.0], [3.0, 0.5], [2.5, 2.0], [0.2, 1.5]]).unwrap();
        let mut scene = Scene::new(MappingPair64::new(sq, q).unwrap());
        let fig = render(&scene).unwrap();
        assert_eq!(fig.svg.matches("<path").count(), 4);
        assert_eq!(fig.svg.matches("<text").count(), 8);
        assert_eq!(fig.curve.len(), DEFAULT_CURVE_SAMPLES);
        assert_eq!(fig.image.len(), fig.curve.len());
        assert!(fig.image_crossings.is_empty());

        scene.payload = Some(Payload::Points(vec![Point64::new(0.5, 0.5), Point64::new(0.25, 0.5)]));
        let fig = render(&scene).unwrap();
        assert_eq!(fig.svg.matches("<path").count(), 2);
        assert_eq!(fig.svg.matches("<circle").count(), 4);
    }
}
