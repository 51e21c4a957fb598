//! Planar primitives: vectors, polygons, orientation predicates and point
//! location.
//!
//! Predicates use plain floating point arithmetic. Results near degeneracy
//! (almost collinear triples, points within rounding distance of an edge)
//! are not robust.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

pub type Point2<T> = Vec2<T>;
pub type Vector2<T> = Vec2<T>;

impl<T: Scalar> Vec2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// Builds a vector, rejecting NaN and infinite components.
    pub fn checked(x: T, y: T) -> Result<Self> {
        let v = Self { x, y };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(0))
        }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Self) -> T {
        cross(self, other)
    }

    #[inline]
    pub fn perp(self) -> Self {
        perp(self)
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// `(1 - mu) * self + mu * other`.
    #[inline]
    pub fn lerp(self, other: Self, mu: T) -> Self {
        self * (T::one() - mu) + other * mu
    }

    pub fn cast<U: Scalar>(self) -> Vec2<U> {
        Vec2::new(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
        )
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> AddAssign for Vec2<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.x = self.x + o.x;
        self.y = self.y + o.y;
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Div<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Scalar> std::iter::Sum for Vec2<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T> From<[T; 2]> for Vec2<T> {
    fn from([x, y]: [T; 2]) -> Self {
        Self { x, y }
    }
}

impl<T> From<Vec2<T>> for [T; 2] {
    fn from(v: Vec2<T>) -> Self {
        [v.x, v.y]
    }
}

/// Two-dimensional cross product `a.x * b.y - a.y * b.x`.
#[inline]
pub fn cross<T: Scalar>(a: Vec2<T>, b: Vec2<T>) -> T {
    a.x * b.y - a.y * b.x
}

/// Rotation by a quarter turn anticlockwise: `(x, y) -> (-y, x)`.
#[inline]
pub fn perp<T: Scalar>(a: Vec2<T>) -> Vec2<T> {
    Vec2::new(-a.y, a.x)
}

/// Signed area of the triangle `[p, q, r]`, positive when anticlockwise.
#[inline]
pub fn signed_area<T: Scalar>(p: Vec2<T>, q: Vec2<T>, r: Vec2<T>) -> T {
    T::half() * cross(q - p, r - q)
}

/// Twice the signed area, without the halving. Used by predicates where only
/// the sign matters.
#[inline]
fn orient<T: Scalar>(p: Vec2<T>, q: Vec2<T>, r: Vec2<T>) -> T {
    cross(q - p, r - p)
}

/// True when `p` is collinear with `[a, b]` and lies strictly between them.
fn strictly_inside_segment<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> bool {
    if orient(a, b, p) != T::zero() {
        return false;
    }
    let d = b - a;
    let s = (p - a).dot(d);
    s > T::zero() && s < d.norm_sq()
}

/// True iff the segments `[a0, a1]` and `[b0, b1]` cross, or an endpoint of
/// one lies strictly inside the other. Touching at shared endpoints does not
/// count.
pub fn segments_properly_intersect<T: Scalar>(
    a0: Vec2<T>,
    a1: Vec2<T>,
    b0: Vec2<T>,
    b1: Vec2<T>,
) -> bool {
    let o1 = orient(a0, a1, b0);
    let o2 = orient(a0, a1, b1);
    let o3 = orient(b0, b1, a0);
    let o4 = orient(b0, b1, a1);
    let zero = T::zero();
    if ((o1 > zero && o2 < zero) || (o1 < zero && o2 > zero))
        && ((o3 > zero && o4 < zero) || (o3 < zero && o4 > zero))
    {
        return true;
    }
    strictly_inside_segment(b0, a0, a1)
        || strictly_inside_segment(b1, a0, a1)
        || strictly_inside_segment(a0, b0, b1)
        || strictly_inside_segment(a1, b0, b1)
}

/// Where a point sits relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeLocation<T> {
    Interior,
    /// Within tolerance of vertex `i`.
    Vertex(usize),
    /// On edge `[p_edge, p_{edge+1}]` at `(1 - mu) p_edge + mu p_{edge+1}`,
    /// with `mu` strictly inside `(0, 1)`.
    Edge { edge: usize, mu: T },
    Exterior,
}

impl<T> EdgeLocation<T> {
    pub fn is_interior(&self) -> bool {
        matches!(self, EdgeLocation::Interior)
    }

    pub fn is_exterior(&self) -> bool {
        matches!(self, EdgeLocation::Exterior)
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, EdgeLocation::Vertex(_) | EdgeLocation::Edge { .. })
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox<T> {
    pub min: Vec2<T>,
    pub max: Vec2<T>,
}

impl<T: Scalar> BBox<T> {
    pub fn of(points: &[Vec2<T>]) -> Self {
        let mut min = points[0];
        let mut max = points[0];
        for p in &points[1..] {
            min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
            max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
        }
        Self { min, max }
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }
}

/// A simple polygon stored with anticlockwise vertex order.
///
/// Construction validates the vertex list (at least three finite, pairwise
/// distinct vertices, no crossing or overlapping edges, nonzero area) and
/// reverses clockwise input. Reversal keeps vertex 0 in place, so input
/// vertex `i` ends up at index `(n - i) % n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<T> {
    vertices: Vec<Vec2<T>>,
    flipped: bool,
    diameter: T,
}

impl<T: Scalar> Polygon<T> {
    pub fn new(vertices: Vec<Vec2<T>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::RepeatedVertex(i, j));
                }
            }
        }
        check_simple(&vertices)?;

        let area = polygon_area(&vertices);
        if area == T::zero() || !area.is_finite() {
            return Err(Error::ZeroArea);
        }
        let flipped = area < T::zero();
        let vertices = if flipped {
            reverse_keep_first(vertices)
        } else {
            vertices
        };
        let diameter = diameter_of(&vertices);
        Ok(Self {
            vertices,
            flipped,
            diameter,
        })
    }

    /// Convenience constructor from coordinate pairs.
    pub fn from_coords(coords: &[[T; 2]]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| Vec2::from(c)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Always false; a polygon has at least three vertices.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    /// Vertex with cyclic indexing; negative offsets are allowed.
    #[inline]
    pub fn vertex(&self, i: isize) -> Vec2<T> {
        let n = self.vertices.len() as isize;
        self.vertices[i.rem_euclid(n) as usize]
    }

    /// Whether the input was clockwise and got reversed.
    pub fn was_flipped(&self) -> bool {
        self.flipped
    }

    /// Edge `i` as its endpoints `(p_i, p_{i+1})`.
    #[inline]
    pub fn edge(&self, i: usize) -> (Vec2<T>, Vec2<T>) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    /// Total signed area (positive).
    pub fn area(&self) -> T {
        polygon_area(&self.vertices)
    }

    /// Largest distance between two vertices.
    #[inline]
    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn bbox(&self) -> BBox<T> {
        BBox::of(&self.vertices)
    }

    /// Signed area of the corner triangle `(p_{i-1}, p_i, p_{i+1})`.
    pub fn corner_area(&self, i: usize) -> T {
        let i = i as isize;
        signed_area(self.vertex(i - 1), self.vertex(i), self.vertex(i + 1))
    }

    /// Default boundary snapping distance: `1e-9` times the diameter.
    pub fn default_tolerance(&self) -> T {
        T::lit(1e-9) * self.diameter
    }

    /// Classifies `x` with the default tolerance.
    pub fn locate(&self, x: Vec2<T>) -> EdgeLocation<T> {
        self.locate_with(x, self.default_tolerance())
    }

    /// Classifies `x`. Points within `tol` of a vertex report `Vertex`
    /// (vertices take precedence), points within `tol` of an edge report
    /// `Edge`, the rest are split by a crossing-number test.
    pub fn locate_with(&self, x: Vec2<T>, tol: T) -> EdgeLocation<T> {
        let n = self.vertices.len();
        let tol_sq = tol * tol;

        let mut nearest: Option<(usize, T)> = None;
        for (i, p) in self.vertices.iter().enumerate() {
            let d = (*p - x).norm_sq();
            if d <= tol_sq && nearest.is_none_or(|(_, best)| d < best) {
                nearest = Some((i, d));
            }
        }
        if let Some((i, _)) = nearest {
            return EdgeLocation::Vertex(i);
        }

        let mut best_edge: Option<(usize, T, T)> = None;
        for i in 0..n {
            let (a, b) = self.edge(i);
            let d = b - a;
            let mu = (x - a).dot(d) / d.norm_sq();
            if mu <= T::zero() || mu >= T::one() {
                continue;
            }
            let foot = a.lerp(b, mu);
            let dist_sq = (x - foot).norm_sq();
            if dist_sq <= tol_sq && best_edge.is_none_or(|(_, _, best)| dist_sq < best) {
                best_edge = Some((i, mu, dist_sq));
            }
        }
        if let Some((edge, mu, _)) = best_edge {
            return EdgeLocation::Edge { edge, mu };
        }

        if self.contains_strict(x) {
            EdgeLocation::Interior
        } else {
            EdgeLocation::Exterior
        }
    }

    /// Crossing-number point-in-polygon test without boundary handling.
    pub fn contains_strict(&self, x: Vec2<T>) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[j];
            if (a.y > x.y) != (b.y > x.y) {
                let t = (x.y - a.y) / (b.y - a.y);
                if x.x < a.x + t * (b.x - a.x) {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Applies `f` to every vertex and rebuilds the polygon.
    pub fn map_vertices(&self, f: impl Fn(Vec2<T>) -> Vec2<T>) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&v| f(v)).collect())
    }

    pub fn cast<U: Scalar>(&self) -> Result<Polygon<U>> {
        Polygon::new(self.vertices.iter().map(|v| v.cast()).collect())
    }
}

fn polygon_area<T: Scalar>(v: &[Vec2<T>]) -> T {
    let n = v.len();
    let mut s = T::zero();
    for i in 0..n {
        s = s + cross(v[i], v[(i + 1) % n]);
    }
    s * T::half()
}

fn diameter_of<T: Scalar>(v: &[Vec2<T>]) -> T {
    let mut d = T::zero();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d = d.max(v[i].distance(v[j]));
        }
    }
    d
}

fn reverse_keep_first<T: Copy>(mut v: Vec<T>) -> Vec<T> {
    v[1..].reverse();
    v
}

fn check_simple<T: Scalar>(v: &[Vec2<T>]) -> Result<()> {
    let n = v.len();
    for i in 0..n {
        let (a0, a1) = (v[i], v[(i + 1) % n]);
        // Adjacent edges may only share their common vertex; catch the
        // second edge folding back along the first.
        let a2 = v[(i + 2) % n];
        if orient(a0, a1, a2) == T::zero() && (a2 - a1).dot(a0 - a1) > T::zero() {
            return Err(Error::SelfIntersecting(i, (i + 1) % n));
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (b0, b1) = (v[j], v[(j + 1) % n]);
            if segments_properly_intersect(a0, a1, b0, b1) {
                return Err(Error::SelfIntersecting(i, j));
            }
        }
    }
    Ok(())
}

/// Convexity test with the default collinearity tolerance of
/// `1e-12 * diameter^2` on corner areas.
pub fn is_convex<T: Scalar>(poly: &Polygon<T>) -> bool {
    let d = poly.diameter();
    is_convex_with(poly, T::lit(1e-12) * d * d)
}

/// True iff no corner area is below `-eps` and at least three corners have
/// area above `eps`. Corners with area in `[-eps, eps]` count as collinear
/// and are tolerated.
pub fn is_convex_with<T: Scalar>(poly: &Polygon<T>, eps: T) -> bool {
    let mut strict = 0;
    for i in 0..poly.len() {
        let a = poly.corner_area(i);
        if a < -eps {
            return false;
        }
        if a > eps {
            strict += 1;
        }
    }
    strict >= 3
}

/// Random convex polygon with `n` vertices, deterministic in `seed`.
///
/// Vertices lie on a randomly stretched and rotated ellipse, so the polygon
/// is strictly convex. Angular gaps are drawn with a random concentration,
/// which produces everything from near-regular shapes to polygons with
/// clustered vertices and almost flat corners. The result is centred at the
/// origin with diameter close to 2.
pub fn random_convex_polygon<T: Scalar>(n: usize, seed: u64) -> Polygon<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_convex_polygon_with(n, &mut rng)
}

pub(crate) fn random_convex_polygon_with<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> Polygon<T> {
    assert!(n >= 3, "random_convex_polygon needs n >= 3");
    loop {
        if let Some(p) = try_random_convex(n, rng) {
            return p;
        }
    }
}

fn try_random_convex<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> Option<Polygon<T>> {
    // Half the draws are ellipse samples, half are triangles with the
    // remaining vertices bulging slightly off the sides. The second family
    // covers nearly flat corners, which plain ellipse samples almost never hit.
    let mut pts = if rng.gen_bool(0.5) {
        ellipse_points(n, rng)
    } else {
        near_triangle_points(n, rng)
    };
    let shift = rng.gen_range(0..n);
    pts.rotate_left(shift);

    // Normalise to diameter 2 around the vertex centroid.
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n as f64;
    let mut diam: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diam = diam.max((pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]));
        }
    }
    let k = 2.0 / diam;
    let verts = pts
        .iter()
        .map(|p| Vec2::new(T::lit((p[0] - cx) * k), T::lit((p[1] - cy) * k)))
        .collect();
    let poly = Polygon::new(verts).ok()?;
    if poly.was_flipped() || !is_convex(&poly) {
        return None;
    }
    Some(poly)
}

/// Points on a rotated ellipse with aspect in [1, 16). Gap weights are
/// exponential variates raised to a random power: large powers cluster
/// vertices, small ones spread them evenly.
fn ellipse_points<R: Rng>(n: usize, rng: &mut R) -> Vec<[f64; 2]> {
    use std::f64::consts::TAU;

    let power: f64 = rng.gen_range(0.0..2.5);
    let gaps: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = -(1.0 - rng.gen::<f64>()).ln();
            e.powf(power).max(1e-6)
        })
        .collect();
    let total: f64 = gaps.iter().sum();
    let start: f64 = rng.gen_range(0.0..TAU);
    let aspect: f64 = rng.gen_range(0.0..16f64.ln()).exp();
    let rot: f64 = rng.gen_range(0.0..TAU);
    let (s, c) = rot.sin_cos();

    let mut theta = start;
    let mut pts = Vec::with_capacity(n);
    for g in &gaps {
        let (py, px) = theta.sin_cos();
        let (ex, ey) = (px * aspect, py);
        pts.push([c * ex - s * ey, s * ex + c * ey]);
        theta += TAU * g / total;
    }
    pts
}

/// An ellipse triangle with the other `n - 3` vertices on its sides, pushed
/// outward along a parabola of relative height in [1e-7, 1e-2).
fn near_triangle_points<R: Rng>(n: usize, rng: &mut R) -> Vec<[f64; 2]> {
    let corners = ellipse_points(3, rng);
    let mut sides: [Vec<f64>; 3] = Default::default();
    for _ in 3..n {
        sides[rng.gen_range(0..3)].push(rng.gen::<f64>());
    }
    let mut pts = Vec::with_capacity(n);
    for (s, lams) in sides.iter_mut().enumerate() {
        let a = corners[s];
        let b = corners[(s + 1) % 3];
        pts.push(a);
        let bulge: f64 = rng.gen_range(1e-7f64.ln()..1e-2f64.ln()).exp();
        // Outward normal scaled by the side length, for anticlockwise corners.
        let (nx, ny) = (b[1] - a[1], a[0] - b[0]);
        lams.sort_by(f64::total_cmp);
        for &l in lams.iter() {
            let h = bulge * 4.0 * l * (1.0 - l);
            pts.push([a[0] + (b[0] - a[0]) * l + nx * h, a[1] + (b[1] - a[1]) * l + ny * h]);
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn unit_square() -> Polygon<f64> {
        Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn regular(n: usize) -> Polygon<f64> {
        Polygon::new(
            (0..n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    v(a.cos(), a.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cross_examples() {
        assert_eq!(cross(v(1.0, 0.0), v(0.0, 1.0)), 1.0);
        assert_eq!(cross(v(1.0, 0.0), v(1.0, 0.0)), 0.0);
        assert_eq!(cross(v(2.0, 3.0), v(4.0, 5.0)), -2.0);
    }

    #[test]
    fn perp_examples() {
        assert_eq!(perp(v(1.0, 0.0)), v(0.0, 1.0));
        assert_eq!(perp(v(0.0, 0.0)), v(0.0, 0.0));
        assert_eq!(perp(v(3.0, -2.0)), v(2.0, 3.0));
        let a = v(3.0, -2.0);
        assert_eq!(cross(a, perp(a)), a.norm_sq());
    }

    #[test]
    fn signed_area_examples() {
        assert_eq!(signed_area(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)), 0.5);
        assert_eq!(signed_area(v(0.0, 0.0), v(1.0, 1.0), v(2.0, 2.0)), 0.0);
        assert_eq!(signed_area(v(0.0, 0.0), v(0.0, 1.0), v(1.0, 0.0)), -0.5);
    }

    #[test]
    fn locate_examples() {
        let sq = unit_square();
        assert_eq!(sq.locate_with(v(0.5, 0.5), 1e-12), EdgeLocation::Interior);
        assert_eq!(
            sq.locate_with(v(0.5, 0.0), 1e-12),
            EdgeLocation::Edge { edge: 0, mu: 0.5 }
        );
        assert_eq!(sq.locate_with(v(2.0, 2.0), 1e-12), EdgeLocation::Exterior);
        assert_eq!(sq.locate_with(v(1.0, 1.0), 1e-12), EdgeLocation::Vertex(2));
        // Vertex wins over the two incident edges.
        assert_eq!(sq.locate_with(v(1e-10, 0.0), 1e-9), EdgeLocation::Vertex(0));
        assert_eq!(
            sq.locate_with(v(0.25, -1e-10), 1e-9),
            EdgeLocation::Edge { edge: 0, mu: 0.25 }
        );
    }

    #[test]
    fn segment_examples() {
        assert!(segments_properly_intersect(
            v(0.0, 0.0),
            v(1.0, 1.0),
            v(0.0, 1.0),
            v(1.0, 0.0)
        ));
        assert!(!segments_properly_intersect(
            v(0.0, 0.0),
            v(1.0, 0.0),
            v(0.0, 1.0),
            v(1.0, 1.0)
        ));
        assert!(!segments_properly_intersect(
            v(0.0, 0.0),
            v(1.0, 0.0),
            v(1.0, 0.0),
            v(2.0, 0.0)
        ));
        // T-junction and collinear overlap both count.
        assert!(segments_properly_intersect(
            v(0.0, 0.0),
            v(2.0, 0.0),
            v(1.0, 0.0),
            v(1.0, 1.0)
        ));
        assert!(segments_properly_intersect(
            v(0.0, 0.0),
            v(2.0, 0.0),
            v(1.0, 0.0),
            v(3.0, 0.0)
        ));
    }

    #[test]
    fn convexity_examples() {
        assert!(is_convex(&unit_square()));
        // The closing edge of this quad runs through (1,1).
        assert_eq!(
            Polygon::from_coords(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0], [2.0, 2.0]]),
            Err(Error::SelfIntersecting(1, 3))
        );
        let dart =
            Polygon::from_coords(&[[0.0, 0.0], [2.0, 0.0], [0.75, 0.75], [0.0, 2.0]]).unwrap();
        assert_eq!(dart.corner_area(2), 0.5 * (-1.25 * 1.25 + 0.75 * 0.75));
        assert!(dart.corner_area(2) < 0.0);
        assert!(!is_convex(&dart));
        assert!(is_convex(&regular(5)));
    }

    #[test]
    fn collinear_corner_tolerated() {
        let p = Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]])
            .unwrap();
        assert!(is_convex(&p));
    }

    #[test]
    fn clockwise_input_is_reversed() {
        let p = Polygon::from_coords(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(p.was_flipped());
        assert!(p.area() > 0.0);
        assert_eq!(p.vertices()[0], v(0.0, 0.0));
        assert_eq!(p.vertices()[1], v(1.0, 0.0));
    }

    #[test]
    fn invalid_polygons_rejected() {
        assert_eq!(
            Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0]]),
            Err(Error::TooFewVertices(2))
        );
        assert_eq!(
            Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            Err(Error::RepeatedVertex(1, 2))
        );
        assert!(matches!(
            Polygon::from_coords(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]),
            Err(Error::SelfIntersecting(..))
        ));
        assert_eq!(
            Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [f64::NAN, 1.0]]),
            Err(Error::NonFinite(2))
        );
        assert!(Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        // Spike folding back on itself.
        assert!(Polygon::from_coords(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn random_convex_examples() {
        let tri: Polygon<f64> = random_convex_polygon(3, 42);
        assert_eq!(tri.len(), 3);
        assert!(tri.area() > 0.0);
        assert!(is_convex(&random_convex_polygon::<f64>(4, 1)));
        let a: Polygon<f64> = random_convex_polygon(5, 1);
        let b: Polygon<f64> = random_convex_polygon(5, 2);
        assert_ne!(a.vertices(), b.vertices());
        assert_eq!(a, random_convex_polygon(5, 1));
    }

    #[test]
    fn works_in_f32() {
        let sq = Polygon::<f32>::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .unwrap();
        assert_eq!(sq.locate(Vec2::new(0.5, 0.5)), EdgeLocation::Interior);
        assert!(is_convex(&sq));
    }
}
