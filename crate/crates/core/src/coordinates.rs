//! Mean value coordinates, their weights and gradients, and Wachspress
//! coordinates on convex polygons.
//!
//! For an interior point `x` of a polygon with vertices `p_i`, let
//! `r_i = |p_i - x|`, `e_i = (p_i - x) / r_i`, and let `t_i` be the tangent of
//! half the signed angle subtended at `x` by edge `[p_i, p_{i+1}]`. The mean
//! value weights are `w_i = (t_{i-1} + t_i) / r_i` and the coordinates are
//! `phi_i = w_i / W` with `W = sum(w_i)`.
//!
//! The weight gradient used here is a positive combination of two rotated
//! unit vectors:
//!
//! ```text
//! grad w_i = (u_{i-1} perp(e_{i-1}) - u_i perp(e_{i+1})) / (2 r_i)
//! u_j      = (1/r_j + 1/r_{j+1}) (1 + t_j^2)
//! ```

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::{is_convex, perp, signed_area, EdgeLocation, Polygon, Vec2};
use crate::scalar::Scalar;

/// Inline storage sized for the cages this crate typically handles.
pub(crate) type Buf<T> = SmallVec<[T; 8]>;

/// `1 + cos(alpha)` at or below this value is treated as alpha = ±pi.
pub const SINGULAR_ANGLE_THRESHOLD: f64 = 1e-14;

/// Which family of barycentric coordinates drives a mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoordinateKind {
    #[default]
    MeanValue,
    /// Only defined on convex polygons.
    Wachspress,
}

impl fmt::Display for CoordinateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoordinateKind::MeanValue => "mv",
            CoordinateKind::Wachspress => "wachspress",
        })
    }
}

impl FromStr for CoordinateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mv" | "mean-value" => Ok(CoordinateKind::MeanValue),
            "wachspress" | "wp" => Ok(CoordinateKind::Wachspress),
            other => Err(format!("unknown coordinate kind '{other}'")),
        }
    }
}

/// `tan(alpha / 2)` from `cos(alpha)` and `sin(alpha)` without trigonometric
/// calls.
///
/// Uses `sin / (1 + cos)` when `|1 + cos| >= |sin|`, otherwise
/// `(1 - cos) / sin`. The first form breaks down at `alpha = ±pi`, the second
/// at `alpha = 0`, so one of them is always well conditioned.
pub fn half_tangent<T: Scalar>(dot: T, crs: T) -> Result<T> {
    let one_plus = T::one() + dot;
    if one_plus <= T::lit(SINGULAR_ANGLE_THRESHOLD) {
        return Err(Error::SingularAngle(one_plus.to_f64_lossy()));
    }
    if one_plus.abs() >= crs.abs() {
        Ok(crs / one_plus)
    } else {
        Ok((T::one() - dot) / crs)
    }
}

/// Barycentric coordinate values at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateSet<T> {
    pub phi: Vec<T>,
}

impl<T: Scalar> CoordinateSet<T> {
    /// Coordinates of a point on edge `edge` at parameter `mu`.
    pub fn on_edge(n: usize, edge: usize, mu: T) -> Self {
        let mut phi = vec![T::zero(); n];
        phi[edge] = T::one() - mu;
        phi[(edge + 1) % n] = mu;
        Self { phi }
    }

    pub fn at_vertex(n: usize, i: usize) -> Self {
        let mut phi = vec![T::zero(); n];
        phi[i] = T::one();
        Self { phi }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// `sum(phi_i * points_i)`.
    pub fn combine(&self, points: &[Vec2<T>]) -> Vec2<T> {
        self.phi
            .iter()
            .zip(points)
            .map(|(&f, &p)| p * f)
            .sum()
    }
}

/// Gradients of the homogeneous weights and of the normalised coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet<T> {
    pub grad_w: Vec<Vec2<T>>,
    pub grad_phi: Vec<Vec2<T>>,
}

impl<T: Scalar> GradientSet<T> {
    /// `sum(points_i (x) grad phi_i)` as its two columns `(f_x, f_y)`.
    pub fn combine(&self, points: &[Vec2<T>]) -> (Vec2<T>, Vec2<T>) {
        let mut fx = Vec2::zero();
        let mut fy = Vec2::zero();
        for (g, &q) in self.grad_phi.iter().zip(points) {
            fx += q * g.x;
            fy += q * g.y;
        }
        (fx, fy)
    }
}

/// Every per-point quantity of the mean value construction at an interior
/// point.
#[derive(Debug, Clone)]
pub struct LocalFrame<T> {
    x: Vec2<T>,
    r: Buf<T>,
    e: Buf<Vec2<T>>,
    dot: Buf<T>,
    crs: Buf<T>,
    t: Buf<T>,
    u: Buf<T>,
    w: Buf<T>,
    w_sum: T,
}

impl<T: Scalar> LocalFrame<T> {
    /// Builds the frame at `x`, which must be interior to `poly`.
    ///
    /// Interior-ness is not re-checked. A point coinciding with a vertex
    /// reports `BoundaryPoint`; a point on an edge line between its endpoints
    /// reports `SingularAngle`.
    pub fn new(poly: &Polygon<T>, x: Vec2<T>) -> Result<Self> {
        let verts = poly.vertices();
        let n = verts.len();
        let mut r = Buf::with_capacity(n);
        let mut e = Buf::with_capacity(n);
        for &p in verts {
            let d = p - x;
            let len = d.norm();
            if len == T::zero() {
                return Err(Error::BoundaryPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy()));
            }
            r.push(len);
            e.push(d / len);
        }

        let mut dot = Buf::with_capacity(n);
        let mut crs = Buf::with_capacity(n);
        let mut t = Buf::with_capacity(n);
        let mut u = Buf::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let c = e[i].dot(e[j]);
            let s = e[i].cross(e[j]);
            let ti = half_tangent(c, s)?;
            dot.push(c);
            crs.push(s);
            t.push(ti);
            u.push((r[i].recip() + r[j].recip()) * (T::one() + ti * ti));
        }

        let mut w = Buf::with_capacity(n);
        let mut w_sum = T::zero();
        for i in 0..n {
            let wi = (t[(i + n - 1) % n] + t[i]) / r[i];
            w_sum = w_sum + wi;
            w.push(wi);
        }

        Ok(Self {
            x,
            r,
            e,
            dot,
            crs,
            t,
            u,
            w,
            w_sum,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.r.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// The evaluation point.
    pub fn point(&self) -> Vec2<T> {
        self.x
    }

    /// Distances `r_i = |p_i - x|`.
    pub fn r(&self) -> &[T] {
        &self.r
    }

    /// Unit directions `e_i = (p_i - x) / r_i`.
    pub fn e(&self) -> &[Vec2<T>] {
        &self.e
    }

    /// `e_i . e_{i+1}`, the cosine of the angle at edge `i`.
    pub fn dot(&self) -> &[T] {
        &self.dot
    }

    /// `e_i x e_{i+1}`, the sine of the angle at edge `i`.
    pub fn crs(&self) -> &[T] {
        &self.crs
    }

    /// Half-angle tangents.
    pub fn t(&self) -> &[T] {
        &self.t
    }

    /// `u_j = (1/r_j + 1/r_{j+1}) (1 + t_j^2)`.
    pub fn u(&self) -> &[T] {
        &self.u
    }

    /// Mean value weights.
    pub fn w(&self) -> &[T] {
        &self.w
    }

    /// `W`, the sum of the weights.
    pub fn w_sum(&self) -> T {
        self.w_sum
    }

    pub fn coordinates(&self) -> CoordinateSet<T> {
        CoordinateSet {
            phi: self.w.iter().map(|&w| w / self.w_sum).collect(),
        }
    }

    #[inline]
    pub(crate) fn weight_gradient(&self, i: usize) -> Vec2<T> {
        let n = self.len();
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        (perp(self.e[prev]) * self.u[prev] - perp(self.e[next]) * self.u[i])
            / (T::two() * self.r[i])
    }
}

/// Builds the [`LocalFrame`] at interior point `x`.
pub fn local_frame<T: Scalar>(poly: &Polygon<T>, x: Vec2<T>) -> Result<LocalFrame<T>> {
    LocalFrame::new(poly, x)
}

/// Mean value coordinates anywhere in the closed polygon, using the default
/// boundary tolerance.
pub fn mv_coordinates<T: Scalar>(poly: &Polygon<T>, x: Vec2<T>) -> Result<CoordinateSet<T>> {
    mv_coordinates_with(poly, x, poly.default_tolerance())
}

/// Mean value coordinates with an explicit boundary tolerance. Boundary
/// points get the piecewise linear values of their edge or vertex.
pub fn mv_coordinates_with<T: Scalar>(
    poly: &Polygon<T>,
    x: Vec2<T>,
    tol: T,
) -> Result<CoordinateSet<T>> {
    let n = poly.len();
    match poly.locate_with(x, tol) {
        EdgeLocation::Interior => Ok(LocalFrame::new(poly, x)?.coordinates()),
        EdgeLocation::Vertex(i) => Ok(CoordinateSet::at_vertex(n, i)),
        EdgeLocation::Edge { edge, mu } => Ok(CoordinateSet::on_edge(n, edge, mu)),
        EdgeLocation::Exterior => Err(Error::ExteriorPoint(
            x.x.to_f64_lossy(),
            x.y.to_f64_lossy(),
        )),
    }
}

/// Gradients of the mean value weights `w_i`.
pub fn mv_weight_gradients<T: Scalar>(frame: &LocalFrame<T>) -> Vec<Vec2<T>> {
    (0..frame.len()).map(|i| frame.weight_gradient(i)).collect()
}

/// Gradients of the normalised coordinates by the quotient rule
/// `grad phi_i = grad w_i / W - w_i grad W / W^2`.
pub fn mv_coordinate_gradients<T: Scalar>(frame: &LocalFrame<T>) -> GradientSet<T> {
    let grad_w = mv_weight_gradients(frame);
    let grad_sum: Vec2<T> = grad_w.iter().copied().sum();
    let w_sum = frame.w_sum();
    let grad_phi = grad_w
        .iter()
        .zip(frame.w())
        .map(|(&g, &w)| g / w_sum - grad_sum * (w / (w_sum * w_sum)))
        .collect();
    GradientSet { grad_w, grad_phi }
}

fn require_interior<T: Scalar>(poly: &Polygon<T>, x: Vec2<T>) -> Result<()> {
    match poly.locate(x) {
        EdgeLocation::Interior => Ok(()),
        EdgeLocation::Exterior => Err(Error::ExteriorPoint(
            x.x.to_f64_lossy(),
            x.y.to_f64_lossy(),
        )),
        _ => Err(Error::BoundaryPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy())),
    }
}

/// Homogeneous Wachspress weights in product form,
/// `b_i = C_i * prod_{j != i-1, i} A_j(x)`, where `C_i` is the corner area at
/// `p_i` and `A_j(x)` the area of `[p_j, p_{j+1}, x]`. This equals the usual
/// `C_i / (A_{i-1} A_i)` scaled by `prod A_j`, and stays finite on edges.
fn wachspress_weights<T: Scalar>(
    poly: &Polygon<T>,
    x: Vec2<T>,
) -> (Buf<T>, Buf<Vec2<T>>) {
    let verts = poly.vertices();
    let n = verts.len();
    let edge_area: Buf<T> = (0..n)
        .map(|j| signed_area(verts[j], verts[(j + 1) % n], x))
        .collect();
    let edge_grad: Buf<Vec2<T>> = (0..n)
        .map(|j| perp(verts[(j + 1) % n] - verts[j]) * T::half())
        .collect();

    let mut b = Buf::with_capacity(n);
    let mut gb = Buf::with_capacity(n);
    for i in 0..n {
        let corner = poly.corner_area(i);
        let skip = |j: usize| j == i || j == (i + n - 1) % n;
        let mut prod = T::one();
        let mut grad = Vec2::zero();
        for m in (0..n).filter(|&m| !skip(m)) {
            let mut rest = T::one();
            for j in (0..n).filter(|&j| !skip(j) && j != m) {
                rest = rest * edge_area[j];
            }
            grad += edge_grad[m] * rest;
            prod = prod * edge_area[m];
        }
        b.push(corner * prod);
        gb.push(grad * corner);
    }
    (b, gb)
}

/// Wachspress coordinates at an interior point of a convex polygon.
pub fn wachspress_coordinates<T: Scalar>(
    poly: &Polygon<T>,
    x: Vec2<T>,
) -> Result<CoordinateSet<T>> {
    if !is_convex(poly) {
        return Err(Error::NonConvex);
    }
    require_interior(poly, x)?;
    let (b, _) = wachspress_weights(poly, x);
    let total: T = b.iter().copied().sum();
    Ok(CoordinateSet {
        phi: b.iter().map(|&v| v / total).collect(),
    })
}

/// Wachspress coordinates and their gradients at an interior point of a
/// convex polygon. `grad_w` holds the gradients of the product-form weights.
pub fn wachspress_gradients<T: Scalar>(
    poly: &Polygon<T>,
    x: Vec2<T>,
) -> Result<(CoordinateSet<T>, GradientSet<T>)> {
    if !is_convex(poly) {
        return Err(Error::NonConvex);
    }
    require_interior(poly, x)?;
    Ok(wachspress_unchecked(poly, x))
}

fn wachspress_unchecked<T: Scalar>(
    poly: &Polygon<T>,
    x: Vec2<T>,
) -> (CoordinateSet<T>, GradientSet<T>) {
    let (b, gb) = wachspress_weights(poly, x);
    let total: T = b.iter().copied().sum();
    let grad_total: Vec2<T> = gb.iter().copied().sum();
    let phi = b.iter().map(|&v| v / total).collect();
    let grad_phi = b
        .iter()
        .zip(&gb)
        .map(|(&v, &g)| g / total - grad_total * (v / (total * total)))
        .collect();
    (
        CoordinateSet { phi },
        GradientSet {
            grad_w: gb.to_vec(),
            grad_phi,
        },
    )
}

/// Coordinates and gradients of either family at an interior point.
///
/// The caller guarantees `x` is interior; Wachspress additionally needs a
/// convex polygon, which is checked.
pub fn interior_coordinates<T: Scalar>(
    kind: CoordinateKind,
    poly: &Polygon<T>,
    x: Vec2<T>,
) -> Result<(CoordinateSet<T>, GradientSet<T>)> {
    match kind {
        CoordinateKind::MeanValue => {
            let frame = LocalFrame::new(poly, x)?;
            Ok((frame.coordinates(), mv_coordinate_gradients(&frame)))
        }
        CoordinateKind::Wachspress => {
            if !is_convex(poly) {
                return Err(Error::NonConvex);
            }
            Ok(wachspress_unchecked(poly, x))
        }
    }
}
