//! Barycentric mappings `f(x) = sum(phi_i(x) q_i)`, deformation of payloads,
//! Jacobian sign fields, the injectivity verifier and the counterexample
//! search.

use std::collections::HashMap;
use std::fmt;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coordinates::{interior_coordinates, mv_coordinates_with, CoordinateKind, CoordinateSet, LocalFrame};
use crate::error::{Error, Result};
use crate::geometry::{
    random_convex_polygon_with, segments_properly_intersect, BBox, EdgeLocation, Polygon, Vec2,
};
use crate::jacobian::{jacobian_from_gradients, quad_boundary_d, quad_interior_d, JacobianValue, MappingPair};
use crate::scalar::Scalar;

/// Grid node counts. Rows run along y, columns along x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Resolution {
    pub rows: usize,
    pub cols: usize,
}

impl Resolution {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidResolution(rows, cols));
        }
        Ok(Self { rows, cols })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn count(&self) -> usize {
        self.rows * self.cols
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self { rows: 200, cols: 200 }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Node `(row, col)` of a `res` grid spanning `bbox`, edges included.
pub fn grid_node<T: Scalar>(bbox: &BBox<T>, res: Resolution, row: usize, col: usize) -> Vec2<T> {
    let fx = T::lit(col as f64 / (res.cols - 1) as f64);
    let fy = T::lit(row as f64 / (res.rows - 1) as f64);
    Vec2::new(
        bbox.min.x + bbox.width() * fx,
        bbox.min.y + bbox.height() * fy,
    )
}

/// `f(x)` with the default boundary tolerance of the source.
pub fn map_point<T: Scalar>(pair: &MappingPair<T>, kind: CoordinateKind, x: Vec2<T>) -> Result<Vec2<T>> {
    map_point_with(pair, kind, x, pair.source().default_tolerance())
}

/// `f(x)`. Vertices map to vertices and edge points map linearly onto the
/// matching target edge; only interior points evaluate coordinates.
pub fn map_point_with<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    x: Vec2<T>,
    tol: T,
) -> Result<Vec2<T>> {
    let phi = coordinates_with(pair.source(), kind, x, tol)?;
    Ok(phi.combine(pair.target().vertices()))
}

fn coordinates_with<T: Scalar>(
    poly: &Polygon<T>,
    kind: CoordinateKind,
    x: Vec2<T>,
    tol: T,
) -> Result<CoordinateSet<T>> {
    match kind {
        CoordinateKind::MeanValue => mv_coordinates_with(poly, x, tol),
        CoordinateKind::Wachspress => {
            let n = poly.len();
            match poly.locate_with(x, tol) {
                EdgeLocation::Interior => Ok(interior_coordinates(kind, poly, x)?.0),
                EdgeLocation::Vertex(i) => Ok(CoordinateSet::at_vertex(n, i)),
                EdgeLocation::Edge { edge, mu } => Ok(CoordinateSet::on_edge(n, edge, mu)),
                EdgeLocation::Exterior => Err(Error::ExteriorPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy())),
            }
        }
    }
}

/// Payload of a deformation job.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload<T> {
    Points(Vec<Vec2<T>>),
    Polyline { points: Vec<Vec2<T>>, closed: bool },
    /// Grid nodes over `bbox` (the source bounding box when absent),
    /// expanded row-major.
    Grid { resolution: Resolution, bbox: Option<BBox<T>> },
}

impl<T: Scalar> Payload<T> {
    /// The payload as a flat list of points.
    pub fn points(&self, source: &Polygon<T>) -> Vec<Vec2<T>> {
        match self {
            Payload::Points(p) | Payload::Polyline { points: p, .. } => p.clone(),
            Payload::Grid { resolution, bbox } => {
                let bbox = bbox.unwrap_or_else(|| source.bbox());
                let mut out = Vec::with_capacity(resolution.count());
                for row in 0..resolution.rows {
                    for col in 0..resolution.cols {
                        out.push(grid_node(&bbox, *resolution, row, col));
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationJob<T> {
    pub pair: MappingPair<T>,
    pub payload: Payload<T>,
    pub kind: CoordinateKind,
    /// Boundary tolerance; the source default when absent.
    pub tol: Option<T>,
}

impl<T: Scalar> DeformationJob<T> {
    pub fn new(pair: MappingPair<T>, payload: Payload<T>) -> Self {
        Self {
            pair,
            payload,
            kind: CoordinateKind::MeanValue,
            tol: None,
        }
    }
}

/// Maps every payload point. Failures are collected with their indices.
pub fn deform<T: Scalar>(job: &DeformationJob<T>) -> Result<Vec<Vec2<T>>> {
    let tol = job.tol.unwrap_or_else(|| job.pair.source().default_tolerance());
    let points = job.payload.points(job.pair.source());
    let mapped: Vec<Result<Vec2<T>>> = points
        .par_iter()
        .map(|&x| map_point_with(&job.pair, job.kind, x, tol))
        .collect();
    let mut out = Vec::with_capacity(mapped.len());
    let mut failures = Vec::new();
    for (i, r) in mapped.into_iter().enumerate() {
        match r {
            Ok(p) => out.push(p),
            Err(e) => failures.push((i, e)),
        }
    }
    if failures.is_empty() {
        Ok(out)
    } else {
        Err(Error::Payload(failures))
    }
}

/// Jacobian of the mapping at `x`.
///
/// Mean value mappings of quadrilaterals use the closed-form determinants,
/// including on edges. Other mean value mappings are defined at interior
/// points only. Wachspress mappings (convex source) are smooth on the whole
/// closed polygon.
pub fn jacobian_at<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    x: Vec2<T>,
) -> Result<JacobianValue<T>> {
    let src = pair.source();
    let quad_mv = kind == CoordinateKind::MeanValue && src.len() == 4;
    match src.locate(x) {
        EdgeLocation::Exterior => Err(Error::ExteriorPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy())),
        EdgeLocation::Interior => match interior_jacobian(pair, kind, x, quad_mv) {
            Err(Error::SingularAngle(_)) if quad_mv => near_edge_jacobian(pair, x),
            other => other,
        },
        EdgeLocation::Edge { edge, mu } if quad_mv => {
            Ok(quad_boundary_d(src, edge, mu)?.jacobian(pair.target()))
        }
        _ if kind == CoordinateKind::Wachspress => {
            let (_, g) = interior_coordinates(kind, src, x)?;
            Ok(jacobian_from_gradients(&g, pair.target()))
        }
        _ => Err(Error::BoundaryPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy())),
    }
}

fn interior_jacobian<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    x: Vec2<T>,
    quad_mv: bool,
) -> Result<JacobianValue<T>> {
    if quad_mv {
        let frame = LocalFrame::new(pair.source(), x)?;
        Ok(quad_interior_d(&frame)?.jacobian(pair.target()))
    } else {
        let (_, g) = interior_coordinates(kind, pair.source(), x)?;
        Ok(jacobian_from_gradients(&g, pair.target()))
    }
}

/// Points too close to an edge for the tangent formulas are snapped to the
/// edge with a wider tolerance.
fn near_edge_jacobian<T: Scalar>(pair: &MappingPair<T>, x: Vec2<T>) -> Result<JacobianValue<T>> {
    let src = pair.source();
    match src.locate_with(x, T::lit(1e-6) * src.diameter()) {
        EdgeLocation::Edge { edge, mu } => Ok(quad_boundary_d(src, edge, mu)?.jacobian(pair.target())),
        _ => Err(Error::BoundaryPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy())),
    }
}

/// Central-difference Jacobian of `f` with step `h`.
pub fn finite_difference_jacobian<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    x: Vec2<T>,
    h: T,
) -> Result<T> {
    let f = |p: Vec2<T>| map_point(pair, kind, p);
    let dx = Vec2::new(h, T::zero());
    let dy = Vec2::new(T::zero(), h);
    let two_h = T::two() * h;
    let fx = (f(x + dx)? - f(x - dx)?) / two_h;
    let fy = (f(x + dy)? - f(x - dy)?) / two_h;
    Ok(fx.cross(fy))
}

/// Distance from `x` to the polygon boundary.
pub fn boundary_distance<T: Scalar>(poly: &Polygon<T>, x: Vec2<T>) -> T {
    (0..poly.len())
        .map(|i| {
            let (a, b) = poly.edge(i);
            let d = b - a;
            let mu = ((x - a).dot(d) / d.norm_sq()).max(T::zero()).min(T::one());
            (x - a.lerp(b, mu)).norm()
        })
        .fold(T::infinity(), T::min)
}

/// Finite-difference step for a witness: `1e-6` of the diameter, shrunk so
/// the stencil stays inside the source.
fn witness_step<T: Scalar>(poly: &Polygon<T>, x: Vec2<T>) -> T {
    let h = T::lit(1e-6) * poly.diameter();
    h.min(boundary_distance(poly, x) * T::lit(0.25))
}

/// Jacobian samples on a grid over the source bounding box. Nodes outside
/// the source, and nodes where the mapping has no Jacobian (mean value
/// vertices, and boundary nodes for `n != 4`), are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianField<T> {
    pub resolution: Resolution,
    pub bbox: BBox<T>,
    pub kind: CoordinateKind,
    /// Row-major values.
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> JacobianField<T> {
    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        self.values[row * self.resolution.cols + col]
    }

    pub fn node(&self, row: usize, col: usize) -> Vec2<T> {
        grid_node(&self.bbox, self.resolution, row, col)
    }

    /// Number of present samples.
    pub fn sample_count(&self) -> usize {
        self.values.iter().flatten().count()
    }

    pub fn negative_count(&self) -> usize {
        self.values.iter().flatten().filter(|&&v| v < T::zero()).count()
    }

    /// Smallest sample with its node and `(row, col)`.
    pub fn min(&self) -> Option<(T, Vec2<T>, (usize, usize))> {
        let mut best: Option<(T, usize)> = None;
        for (k, v) in self.values.iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, k));
                }
            }
        }
        best.map(|(v, k)| {
            let (row, col) = (k / self.resolution.cols, k % self.resolution.cols);
            (v, self.node(row, col), (row, col))
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<T>]> {
        self.values.chunks(self.resolution.cols)
    }
}

/// Mean value Jacobian field over the source bounding box.
pub fn jacobian_field<T: Scalar>(pair: &MappingPair<T>, res: Resolution) -> JacobianField<T> {
    field_over(pair, CoordinateKind::MeanValue, res, pair.source().bbox())
}

/// Jacobian field for either coordinate family. Wachspress needs a convex
/// source.
pub fn jacobian_field_with<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    res: Resolution,
) -> Result<JacobianField<T>> {
    check_kind(pair, kind)?;
    Ok(field_over(pair, kind, res, pair.source().bbox()))
}

fn check_kind<T: Scalar>(pair: &MappingPair<T>, kind: CoordinateKind) -> Result<()> {
    if kind == CoordinateKind::Wachspress && !crate::geometry::is_convex(pair.source()) {
        return Err(Error::NonConvex);
    }
    Ok(())
}

fn field_over<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    res: Resolution,
    bbox: BBox<T>,
) -> JacobianField<T> {
    let values = (0..res.count())
        .into_par_iter()
        .map(|k| {
            let x = grid_node(&bbox, res, k / res.cols, k % res.cols);
            jacobian_at(pair, kind, x).ok().map(JacobianValue::value)
        })
        .collect();
    JacobianField {
        resolution: res,
        bbox,
        kind,
        values,
    }
}

/// Outcome of the injectivity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No witness at the sampled resolution. Evidence, not proof.
    InjectiveEvidence,
    /// A finite-difference-confirmed negative Jacobian or a crossing of the
    /// image curve.
    NonInjective,
    /// No usable samples, a zero minimum, or a negative sample that finite
    /// differences do not confirm.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::InjectiveEvidence => "injective-evidence",
            Verdict::NonInjective => "non-injective",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A Jacobian sample near a source vertex, taken along the inward bisector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexProbe<T> {
    pub vertex: usize,
    pub distance: T,
    pub point: Vec2<T>,
    pub jacobian: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityReport<T> {
    pub verdict: Verdict,
    pub kind: CoordinateKind,
    pub min_jacobian: T,
    pub argmin: Vec2<T>,
    /// Finite-difference Jacobian at `argmin` whenever `min_jacobian` is
    /// negative.
    pub witness_fd: Option<T>,
    pub negative_samples: usize,
    /// Crossing segment pairs of the deformed boundary-offset curve.
    pub self_intersections: Vec<(usize, usize)>,
    pub samples: usize,
    pub resolution: Resolution,
    pub vertex_probes: Vec<VertexProbe<T>>,
}

/// Vertex probe distances as fractions of [`local_scale`].
pub const PROBE_DISTANCES: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-6, 1e-8];
/// Inward offset of the boundary curve, relative to the diameter.
pub const OFFSET_DISTANCE: f64 = 1e-3;
/// Samples on the boundary-offset curve.
pub const OFFSET_SAMPLES: usize = 4096;

/// Mean value injectivity check.
pub fn injectivity_report<T: Scalar>(pair: &MappingPair<T>, res: Resolution) -> InjectivityReport<T> {
    report_unchecked(pair, CoordinateKind::MeanValue, res)
}

/// Injectivity check for either coordinate family.
pub fn injectivity_report_with<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    res: Resolution,
) -> Result<InjectivityReport<T>> {
    check_kind(pair, kind)?;
    Ok(report_unchecked(pair, kind, res))
}

fn report_unchecked<T: Scalar>(
    pair: &MappingPair<T>,
    kind: CoordinateKind,
    res: Resolution,
) -> InjectivityReport<T> {
    let src = pair.source();
    let field = field_over(pair, kind, res, src.bbox());
    let probes = vertex_probes(pair, kind);

    let mut samples = field.sample_count() + probes.len();
    let mut negative = field.negative_count() + probes.iter().filter(|p| p.jacobian < T::zero()).count();
    // The witness must admit a finite-difference stencil, so only interior
    // nodes compete for the minimum.
    let mut best: Option<(T, Vec2<T>)> = None;
    for (k, v) in field.values.iter().enumerate() {
        let Some(v) = *v else { continue };
        if best.is_some_and(|(b, _)| v >= b) {
            continue;
        }
        let x = field.node(k / res.cols, k % res.cols);
        if src.locate(x).is_interior() {
            best = Some((v, x));
        }
    }
    for p in &probes {
        if best.is_none_or(|(b, _)| p.jacobian < b) {
            best = Some((p.jacobian, p.point));
        }
    }

    let curve = boundary_offset_curve(src, T::lit(OFFSET_DISTANCE) * src.diameter(), OFFSET_SAMPLES);
    let image: Vec<Vec2<T>> = curve
        .par_iter()
        .filter_map(|&x| map_point(pair, kind, x).ok())
        .collect();
    let crossings = if image.len() == curve.len() {
        self_intersections(&image, true)
    } else {
        Vec::new()
    };
    if curve.is_empty() {
        samples = 0;
        negative = 0;
    }

    let (min_jacobian, argmin) = best.unwrap_or((T::nan(), Vec2::zero()));
    let witness_fd = if best.is_some() && min_jacobian < T::zero() {
        finite_difference_jacobian(pair, kind, argmin, witness_step(src, argmin)).ok()
    } else {
        None
    };
    let verdict = if !crossings.is_empty() {
        Verdict::NonInjective
    } else if best.is_none() || samples == 0 {
        Verdict::Inconclusive
    } else if min_jacobian < T::zero() {
        match witness_fd {
            Some(v) if v < T::zero() => Verdict::NonInjective,
            _ => Verdict::Inconclusive,
        }
    } else if min_jacobian > T::zero() {
        Verdict::InjectiveEvidence
    } else {
        Verdict::Inconclusive
    };

    InjectivityReport {
        verdict,
        kind,
        min_jacobian,
        argmin,
        witness_fd,
        negative_samples: negative,
        self_intersections: crossings,
        samples,
        resolution: res,
        vertex_probes: probes,
    }
}

/// Inward unit normals of the edges of an anticlockwise polygon.
fn inward_normals<T: Scalar>(poly: &Polygon<T>) -> Vec<Vec2<T>> {
    (0..poly.len())
        .map(|i| {
            let (a, b) = poly.edge(i);
            let d = b - a;
            d.perp() / d.norm()
        })
        .collect()
}

/// Miter direction at vertex `i`, scaled so that a step of `delta` along it
/// stays `delta` away from both incident edge lines.
fn miter<T: Scalar>(normals: &[Vec2<T>], i: usize) -> Vec2<T> {
    let n = normals.len();
    let a = normals[(i + n - 1) % n];
    let b = normals[i];
    (a + b) / (T::one() + a.dot(b))
}

fn vertex_probes<T: Scalar>(pair: &MappingPair<T>, kind: CoordinateKind) -> Vec<VertexProbe<T>> {
    let src = pair.source();
    let normals = inward_normals(src);
    let mut out = Vec::new();
    for i in 0..src.len() {
        let m = miter(&normals, i);
        let dir = m / m.norm();
        let scale = local_scale(src, i);
        for &rel in &PROBE_DISTANCES {
            let distance = T::lit(rel) * scale;
            let point = src.vertices()[i] + dir * distance;
            if !src.locate(point).is_interior() {
                continue;
            }
            if let Ok(j) = jacobian_at(pair, kind, point) {
                out.push(VertexProbe {
                    vertex: i,
                    distance,
                    point,
                    jacobian: j.value(),
                });
            }
        }
    }
    out
}

/// Size of the neighbourhood of vertex `i`: the distance from `p_i` to the
/// nearest other vertex or non-incident edge.
pub fn local_scale<T: Scalar>(poly: &Polygon<T>, i: usize) -> T {
    let n = poly.len();
    let p = poly.vertices()[i];
    let mut best = T::infinity();
    for j in (0..n).filter(|&j| j != i) {
        best = best.min((poly.vertices()[j] - p).norm());
        if j != (i + n - 1) % n {
            let (a, b) = poly.edge(j);
            let d = b - a;
            let mu = ((p - a).dot(d) / d.norm_sq()).max(T::zero()).min(T::one());
            best = best.min((p - a.lerp(b, mu)).norm());
        }
    }
    best
}

/// Closed curve inside `poly` at distance `offset` from the boundary,
/// sampled at `samples` points equally spaced by arc length. The offset is
/// halved until the mitered polygon is simple and every sample lies inside.
/// Returns no points if that never happens.
pub fn boundary_offset_curve<T: Scalar>(poly: &Polygon<T>, offset: T, samples: usize) -> Vec<Vec2<T>> {
    let normals = inward_normals(poly);
    let miters: Vec<Vec2<T>> = (0..poly.len()).map(|i| miter(&normals, i)).collect();
    let mut delta = offset;
    for _ in 0..30 {
        let verts: Vec<Vec2<T>> = poly
            .vertices()
            .iter()
            .zip(&miters)
            .map(|(&p, &m)| p + m * delta)
            .collect();
        if let Ok(inner) = Polygon::new(verts) {
            if !inner.was_flipped() {
                let pts = resample_closed(inner.vertices(), samples);
                if pts.iter().all(|&x| poly.locate(x).is_interior()) {
                    return pts;
                }
            }
        }
        delta = delta * T::half();
    }
    Vec::new()
}

/// `samples` points equally spaced by arc length along a closed polyline,
/// starting at its first vertex.
pub fn resample_closed<T: Scalar>(verts: &[Vec2<T>], samples: usize) -> Vec<Vec2<T>> {
    let n = verts.len();
    let lengths: Vec<T> = (0..n).map(|i| (verts[(i + 1) % n] - verts[i]).norm()).collect();
    let total: T = lengths.iter().copied().sum();
    let mut out = Vec::with_capacity(samples);
    let mut seg = 0;
    let mut seg_start = T::zero();
    for k in 0..samples {
        let s = total * T::lit(k as f64 / samples as f64);
        while seg + 1 < n && seg_start + lengths[seg] <= s {
            seg_start = seg_start + lengths[seg];
            seg += 1;
        }
        let mu = ((s - seg_start) / lengths[seg]).min(T::one());
        out.push(verts[seg].lerp(verts[(seg + 1) % n], mu));
    }
    out
}

fn segment_count(len: usize, closed: bool) -> usize {
    match (closed, len) {
        (_, 0 | 1) => 0,
        (true, 2) => 1,
        (true, n) => n,
        (false, n) => n - 1,
    }
}

fn adjacent(i: usize, j: usize, segs: usize, closed: bool) -> bool {
    j == i + 1 || (closed && i == 0 && j + 1 == segs)
}

/// Properly crossing segment pairs `(i, j)`, `i < j`, of a polyline, where
/// segment `i` joins points `i` and `i + 1`. Adjacent segments are skipped.
/// Segments are bucketed in a uniform grid and each pair is tested only in
/// the cell holding the lower corner of their bounding-box overlap.
pub fn self_intersections<T: Scalar>(points: &[Vec2<T>], closed: bool) -> Vec<(usize, usize)> {
    let segs = segment_count(points.len(), closed);
    if segs < 3 {
        return Vec::new();
    }
    let seg = |i: usize| (points[i], points[(i + 1) % points.len()]);
    let bbox = BBox::of(points);
    let cells = ((segs as f64).sqrt().ceil() as usize).clamp(1, 256);
    let cw = bbox.width() / T::lit(cells as f64);
    let ch = bbox.height() / T::lit(cells as f64);
    let cell_of = |v: T, origin: T, size: T| -> usize {
        if size <= T::zero() {
            return 0;
        }
        let c = ((v - origin) / size).to_f64_lossy().floor();
        (c.max(0.0) as usize).min(cells - 1)
    };

    let boxes: Vec<(Vec2<T>, Vec2<T>)> = (0..segs)
        .map(|i| {
            let (a, b) = seg(i);
            (Vec2::new(a.x.min(b.x), a.y.min(b.y)), Vec2::new(a.x.max(b.x), a.y.max(b.y)))
        })
        .collect();
    let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, (lo, hi)) in boxes.iter().enumerate() {
        for cx in cell_of(lo.x, bbox.min.x, cw)..=cell_of(hi.x, bbox.min.x, cw) {
            for cy in cell_of(lo.y, bbox.min.y, ch)..=cell_of(hi.y, bbox.min.y, ch) {
                grid.entry((cx, cy)).or_default().push(i);
            }
        }
    }

    let mut out = Vec::new();
    for (&(cx, cy), ids) in &grid {
        for (k, &i) in ids.iter().enumerate() {
            for &j in &ids[k + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                if adjacent(i, j, segs, closed) {
                    continue;
                }
                let (lo_i, hi_i) = boxes[i];
                let (lo_j, hi_j) = boxes[j];
                let lo = Vec2::new(lo_i.x.max(lo_j.x), lo_i.y.max(lo_j.y));
                if lo.x > hi_i.x.min(hi_j.x) || lo.y > hi_i.y.min(hi_j.y) {
                    continue;
                }
                if cell_of(lo.x, bbox.min.x, cw) != cx || cell_of(lo.y, bbox.min.y, ch) != cy {
                    continue;
                }
                let (a0, a1) = seg(i);
                let (b0, b1) = seg(j);
                if segments_properly_intersect(a0, a1, b0, b1) {
                    out.push((i, j));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// All-pairs version of [`self_intersections`].
pub fn self_intersections_brute<T: Scalar>(points: &[Vec2<T>], closed: bool) -> Vec<(usize, usize)> {
    let segs = segment_count(points.len(), closed);
    let seg = |i: usize| (points[i], points[(i + 1) % points.len()]);
    let mut out = Vec::new();
    for i in 0..segs {
        for j in i + 1..segs {
            if adjacent(i, j, segs, closed) {
                continue;
            }
            let (a0, a1) = seg(i);
            let (b0, b1) = seg(j);
            if segments_properly_intersect(a0, a1, b0, b1) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Search parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Nodes per axis of the screening grid.
    pub screen: usize,
    /// Refinement factor per round.
    pub refine: usize,
    pub rounds: usize,
}

impl SearchOptions {
    pub fn new(n: usize, trials: u64, seed: u64) -> Self {
        Self {
            n,
            trials,
            seed,
            screen: 32,
            refine: 4,
            rounds: 2,
        }
    }
}

/// A pair of convex polygons whose mean value mapping has a negative
/// Jacobian at `witness`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample<T> {
    pub trial: u64,
    pub pair: MappingPair<T>,
    pub witness: Vec2<T>,
    pub jacobian: T,
    pub fd_jacobian: T,
}

/// The `(P, Q)` pair drawn for `trial` under `seed`.
pub fn search_trial_pair<T: Scalar>(n: usize, seed: u64, trial: u64) -> MappingPair<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let p = random_convex_polygon_with(n, &mut rng);
    let q = random_convex_polygon_with(n, &mut rng);
    MappingPair::new(p, q).expect("generated polygons are anticlockwise with equal counts")
}

/// Screens random convex pairs for a negative mean value Jacobian. Each
/// trial draws from its own stream, and the lowest successful trial index
/// is returned, so the result does not depend on scheduling.
pub fn counterexample_search<T: Scalar>(opts: SearchOptions) -> Result<Option<Counterexample<T>>> {
    if opts.n < 5 {
        return Err(Error::SearchTooFewVertices(opts.n));
    }
    let screen = Resolution::square(opts.screen)?;
    Ok((0..opts.trials)
        .into_par_iter()
        .find_map_first(|trial| try_trial(opts, screen, trial)))
}

fn try_trial<T: Scalar>(opts: SearchOptions, screen: Resolution, trial: u64) -> Option<Counterexample<T>> {
    let pair: MappingPair<T> = search_trial_pair(opts.n, opts.seed, trial);
    let kind = CoordinateKind::MeanValue;
    let field = field_over(&pair, kind, screen, pair.source().bbox());
    let (mut best, mut at, _) = field.min()?;
    if best >= T::zero() {
        return None;
    }

    let mut spacing = Vec2::new(
        field.bbox.width() / T::lit((screen.cols - 1) as f64),
        field.bbox.height() / T::lit((screen.rows - 1) as f64),
    );
    for _ in 0..opts.rounds {
        let fine = spacing / T::lit(opts.refine as f64);
        let half = opts.refine as isize * 2;
        for a in -half..=half {
            for b in -half..=half {
                let x = at + Vec2::new(fine.x * T::lit(a as f64), fine.y * T::lit(b as f64));
                if let Ok(j) = jacobian_at(&pair, kind, x) {
                    if j.value() < best {
                        best = j.value();
                        at = x;
                    }
                }
            }
        }
        spacing = fine;
    }

    let fd = finite_difference_jacobian(&pair, kind, at, witness_step(pair.source(), at)).ok()?;
    (fd < T::zero()).then_some(Counterexample {
        trial,
        pair,
        witness: at,
        jacobian: best,
        fd_jacobian: fd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_convex;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn poly(c: &[[f64; 2]]) -> Polygon<f64> {
        Polygon::from_coords(c).unwrap()
    }

    fn square() -> Polygon<f64> {
        poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    fn mv() -> CoordinateKind {
        CoordinateKind::MeanValue
    }

    #[test]
    fn map_point_boundary_and_vertices() {
        let q = poly(&[[0.0, 0.0], [3.0, 0.5], [2.0, 2.0], [-0.5, 1.0]]);
        let pair = MappingPair::new(square(), q.clone()).unwrap();
        for i in 0..4 {
            assert_eq!(map_point(&pair, mv(), square().vertices()[i]).unwrap(), q.vertices()[i]);
        }
        let m = map_point(&pair, mv(), v(0.5, 0.0)).unwrap();
        assert!((m - v(1.5, 0.25)).norm() < 1e-15);
        assert!(matches!(map_point(&pair, mv(), v(2.0, 0.5)), Err(Error::ExteriorPoint(..))));
    }

    #[test]
    fn deform_scaled_square_and_errors() {
        let sq = square();
        let pair = MappingPair::new(sq.clone(), sq.map_vertices(|p| p * 2.0).unwrap()).unwrap();
        let job = DeformationJob::new(pair.clone(), Payload::Points(vec![v(0.5, 0.5), v(0.25, 0.75)]));
        let out = deform(&job).unwrap();
        assert!((out[0] - v(1.0, 1.0)).norm() < 1e-14);
        assert!((out[1] - v(0.5, 1.5)).norm() < 1e-14);

        let bad = DeformationJob::new(pair, Payload::Points(vec![v(0.5, 0.5), v(3.0, 0.0), v(-1.0, 0.5)]));
        match deform(&bad) {
            Err(Error::Payload(f)) => {
                assert_eq!(f.iter().map(|(i, _)| *i).collect::<Vec<_>>(), vec![1, 2]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_payload_is_row_major() {
        let pair = MappingPair::identity(square());
        let res = Resolution::new(2, 3).unwrap();
        let job = DeformationJob::new(pair, Payload::Grid { resolution: res, bbox: None });
        let out = deform(&job).unwrap();
        let expect = [v(0.0, 0.0), v(0.5, 0.0), v(1.0, 0.0), v(0.0, 1.0), v(0.5, 1.0), v(1.0, 1.0)];
        for (a, b) in out.iter().zip(expect) {
            assert!((*a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_field_is_one() {
        let f = jacobian_field(&MappingPair::identity(square()), Resolution::square(9).unwrap());
        // Corners are vertices and have no value.
        assert_eq!(f.sample_count(), 81 - 4);
        for val in f.values.iter().flatten() {
            assert!((val - 1.0).abs() < 1e-12, "{val}");
        }
        assert!(f.get(0, 0).is_none());
        assert!(f.get(0, 4).is_some());
    }

    #[test]
    fn exterior_nodes_are_absent() {
        let tri = poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 1.5]]);
        let f = jacobian_field(&MappingPair::identity(tri), Resolution::square(11).unwrap());
        assert!(f.get(10, 0).is_none());
        assert!(f.get(5, 5).is_some());
    }

    #[test]
    fn resolution_validation() {
        assert_eq!(Resolution::new(1, 5), Err(Error::InvalidResolution(1, 5)));
        assert_eq!(Resolution::default().count(), 40_000);
    }

    #[test]
    fn near_edge_points_use_the_boundary_formula() {
        let pair = MappingPair::identity(square());
        let j = jacobian_at(&pair, mv(), v(0.5, 1e-8)).unwrap();
        assert!((j.value() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn offset_curve_is_inside_and_even() {
        let p = poly(&[[0.0, 0.0], [2.0, 0.0], [0.75, 0.75], [0.0, 2.0]]);
        let c = boundary_offset_curve(&p, 1e-3 * p.diameter(), 4096);
        assert_eq!(c.len(), 4096);
        assert!(c.iter().all(|&x| p.locate(x).is_interior()));
        for x in c.iter().step_by(97) {
            assert!(boundary_distance(&p, *x) <= 1e-3 * p.diameter() * 1.0001);
        }
        assert!(self_intersections(&c, true).is_empty());
    }

    #[test]
    fn self_intersection_examples() {
        let bowtie = [v(0.0, 0.0), v(1.0, 1.0), v(1.0, 0.0), v(0.0, 1.0)];
        assert_eq!(self_intersections(&bowtie, true), vec![(0, 2)]);
        assert_eq!(self_intersections_brute(&bowtie, true), vec![(0, 2)]);
        assert!(self_intersections(&bowtie, false).is_empty() || self_intersections(&bowtie, false) == vec![(0, 2)]);
        let sq = [v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        assert!(self_intersections(&sq, true).is_empty());
    }

    #[test]
    fn reports_for_the_basic_regimes() {
        let id = injectivity_report(&MappingPair::identity(square()), Resolution::square(50).unwrap());
        assert_eq!(id.verdict, Verdict::InjectiveEvidence);
        assert!((id.min_jacobian - 1.0).abs() < 1e-10);

        let concave = poly(&[[0.0, 0.0], [2.0, 0.0], [0.75, 0.75], [0.0, 2.0]]);
        let convex = poly(&[[0.0, 0.0], [1.0, 0.0], [1.2, 1.1], [0.0, 1.0]]);
        let good = injectivity_report(&MappingPair::new(concave, convex).unwrap(), Resolution::square(60).unwrap());
        assert_eq!(good.verdict, Verdict::InjectiveEvidence);
        assert!(good.min_jacobian > 0.0);

        let dart = poly(&[[0.0, 0.0], [1.0, 0.0], [0.3, 0.3], [0.0, 1.0]]);
        let pair = MappingPair::new(square(), dart).unwrap();
        let wp = injectivity_report_with(&pair, CoordinateKind::Wachspress, Resolution::square(60).unwrap()).unwrap();
        assert_eq!(wp.verdict, Verdict::NonInjective);
        assert!(wp.witness_fd.unwrap() < 0.0);
        assert!((wp.argmin - v(1.0, 1.0)).norm() < 0.5);
    }

    #[test]
    fn search_rejects_quads_and_is_deterministic() {
        assert_eq!(
            counterexample_search::<f64>(SearchOptions::new(4, 10, 1)),
            Err(Error::SearchTooFewVertices(4))
        );
        let a: MappingPair<f64> = search_trial_pair(5, 3, 17);
        let b: MappingPair<f64> = search_trial_pair(5, 3, 17);
        assert_eq!(a, b);
        assert!(is_convex(a.source()) && is_convex(a.target()));
        assert_ne!(a, search_trial_pair(5, 3, 18));
    }
}
