//! Random inputs for property suites: simple and concave polygons, interior
//! and edge points.

use rand::Rng;

use crate::geometry::{is_convex, random_convex_polygon_with, Polygon, Vec2};
use crate::mapping::{boundary_distance, local_scale};
use crate::scalar::Scalar;

/// A star-shaped simple polygon: sorted random angles around the origin
/// with radii in `[0.2, 1]`, and area at least `0.01` of the squared
/// diameter. Often concave for `n >= 4`.
pub fn random_simple_polygon<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> Polygon<T> {
    use std::f64::consts::TAU;
    assert!(n >= 3);
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let verts = angles
            .iter()
            .map(|a| {
                let r = rng.gen_range(0.2..1.0);
                Vec2::new(T::lit(r * a.cos()), T::lit(r * a.sin()))
            })
            .collect();
        if let Ok(p) = Polygon::new(verts) {
            let d = p.diameter();
            if !p.was_flipped()
                && min_abs_relative_corner(&p) > T::lit(1e-6)
                && p.area() >= T::lit(1e-2) * d * d
            {
                return p;
            }
        }
    }
}

/// Any random convex polygon from the mixed generator.
pub fn random_convex<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> Polygon<T> {
    random_convex_polygon_with(n, rng)
}

/// A random convex polygon whose corners all exceed `min_corner` of the
/// area and whose vertices are at least `min_scale` of the diameter from
/// every other vertex and non-incident edge.
pub fn random_well_shaped_convex<T: Scalar, R: Rng>(
    n: usize,
    min_corner: f64,
    min_scale: f64,
    rng: &mut R,
) -> Polygon<T> {
    loop {
        let p: Polygon<T> = random_convex_polygon_with(n, rng);
        let d = p.diameter();
        if min_relative_corner(&p) >= T::lit(min_corner)
            && (0..n).all(|i| local_scale(&p, i) >= T::lit(min_scale) * d)
        {
            return p;
        }
    }
}

/// A quadrilateral with exactly one reflex corner, made by pushing one
/// vertex of a random convex quad past the opposite diagonal.
pub fn random_concave_quad<T: Scalar, R: Rng>(rng: &mut R) -> Polygon<T> {
    loop {
        let q: Polygon<T> = random_convex_polygon_with(4, rng);
        let v = q.vertices();
        let i = rng.gen_range(0..4);
        let mid = (v[(i + 3) % 4] + v[(i + 1) % 4]) * T::half();
        let s = T::lit(rng.gen_range(0.05..0.9));
        let mut w = v.to_vec();
        w[i] = mid + (v[(i + 2) % 4] - mid) * s;
        if let Ok(p) = Polygon::new(w) {
            if !p.was_flipped() && !is_convex(&p) {
                return p;
            }
        }
    }
}

/// Smallest corner area over the polygon area. Negative for concave
/// polygons.
pub fn min_relative_corner<T: Scalar>(poly: &Polygon<T>) -> T {
    (0..poly.len())
        .map(|i| poly.corner_area(i) / poly.area())
        .fold(T::infinity(), T::min)
}

/// Smallest absolute corner area over the polygon area.
pub fn min_abs_relative_corner<T: Scalar>(poly: &Polygon<T>) -> T {
    (0..poly.len())
        .map(|i| poly.corner_area(i).abs() / poly.area())
        .fold(T::infinity(), T::min)
}

/// Uniform point in the bounding box, rejected until it is interior and at
/// least `margin` times the diameter away from the boundary.
pub fn random_interior_point<T: Scalar, R: Rng>(poly: &Polygon<T>, margin: f64, rng: &mut R) -> Vec2<T> {
    let b = poly.bbox();
    let min_dist = T::lit(margin) * poly.diameter();
    for _ in 0..1_000_000 {
        let x = Vec2::new(
            b.min.x + b.width() * T::lit(rng.gen::<f64>()),
            b.min.y + b.height() * T::lit(rng.gen::<f64>()),
        );
        if poly.locate(x).is_interior() && boundary_distance(poly, x) >= min_dist {
            return x;
        }
    }
    panic!("no interior point {margin} of the diameter away from the boundary");
}

/// Random point strictly inside a random edge: `(edge, mu, point)`.
pub fn random_edge_point<T: Scalar, R: Rng>(poly: &Polygon<T>, rng: &mut R) -> (usize, T, Vec2<T>) {
    let edge = rng.gen_range(0..poly.len());
    let mu = T::lit(rng.gen_range(0.01..0.99));
    let (a, b) = poly.edge(edge);
    (edge, mu, a.lerp(b, mu))
}
