//! Jacobians of barycentric mappings.
//!
//! For a mapping `f(x) = sum(phi_i(x) q_i)` the Jacobian expands over vertex
//! triples as
//!
//! ```text
//! J(f)(x) = 2 * sum_{i<j<k} D(phi_i, phi_j, phi_k)(x) * A(q_i, q_j, q_k)
//! ```
//!
//! where `D(a, b, c)` is the 3x3 determinant with rows `(a, b, c)`, their x
//! partials and their y partials. For quadrilaterals the four triples are the
//! consecutive ones, and the determinants `D_i = D(phi_{i-1}, phi_i,
//! phi_{i+1})` of mean value coordinates have a closed form in terms of the
//! local frame. They are positive inside any simple quadrilateral, which makes
//! `J` positive whenever the target is convex.

use crate::coordinates::{half_tangent, mv_coordinate_gradients, CoordinateSet, GradientSet, LocalFrame};
use crate::error::{Error, Result};
use crate::geometry::{is_convex, signed_area, EdgeLocation, Polygon, Vec2};
use crate::scalar::Scalar;

/// A source cage and a target cage with matching vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingPair<T> {
    source: Polygon<T>,
    target: Polygon<T>,
}

impl<T: Scalar> MappingPair<T> {
    /// Pairs two polygons. Both must have the same vertex count and the same
    /// input orientation, so the vertex correspondence survives the
    /// anticlockwise normalisation.
    pub fn new(source: Polygon<T>, target: Polygon<T>) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::VertexCountMismatch(source.len(), target.len()));
        }
        if source.was_flipped() != target.was_flipped() {
            return Err(Error::OrientationMismatch);
        }
        Ok(Self { source, target })
    }

    /// The mapping from `source` onto itself.
    pub fn identity(source: Polygon<T>) -> Self {
        Self {
            target: source.clone(),
            source,
        }
    }

    pub fn source(&self) -> &Polygon<T> {
        &self.source
    }

    pub fn target(&self) -> &Polygon<T> {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A Jacobian determinant value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct JacobianValue<T>(pub T);

impl<T: Scalar> JacobianValue<T> {
    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 > T::zero()
    }
}

/// Where a set of quadrilateral determinants was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadLocation<T> {
    Interior,
    Edge { edge: usize, mu: T },
}

/// The determinants `D_i = D(phi_{i-1}, phi_i, phi_{i+1})` of a
/// quadrilateral's mean value coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadDeterminants<T> {
    pub d: [T; 4],
    pub location: QuadLocation<T>,
}

impl<T: Scalar> QuadDeterminants<T> {
    /// Jacobian of the mapping onto `target`:
    /// `2 * sum_i D_i * A(q_{i-1}, q_i, q_{i+1})`.
    pub fn jacobian(&self, target: &Polygon<T>) -> JacobianValue<T> {
        let mut j = T::zero();
        for (i, &d) in self.d.iter().enumerate() {
            j = j + d * target.corner_area(i);
        }
        JacobianValue(T::two() * j)
    }
}

/// 3x3 determinant with first row `values` and the x and y components of
/// `gradients` as the second and third rows.
#[inline]
pub fn det3<T: Scalar>(values: [T; 3], gradients: [Vec2<T>; 3]) -> T {
    let [a, b, c] = values;
    let [ga, gb, gc] = gradients;
    a * gb.cross(gc) - b * ga.cross(gc) + c * ga.cross(gb)
}

/// `D(phi_i, phi_j, phi_k)` from a coordinate set and its gradients.
pub fn triple_determinant<T: Scalar>(
    phi: &CoordinateSet<T>,
    grad: &GradientSet<T>,
    (i, j, k): (usize, usize, usize),
) -> T {
    det3(
        [phi.phi[i], phi.phi[j], phi.phi[k]],
        [grad.grad_phi[i], grad.grad_phi[j], grad.grad_phi[k]],
    )
}

/// Jacobian at an interior point by summing over all vertex triples of the
/// source's mean value coordinates.
pub fn jacobian_via_triples<T: Scalar>(
    pair: &MappingPair<T>,
    x: Vec2<T>,
) -> Result<JacobianValue<T>> {
    match pair.source.locate(x) {
        EdgeLocation::Interior => {}
        EdgeLocation::Exterior => {
            return Err(Error::ExteriorPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy()))
        }
        _ => return Err(Error::BoundaryPoint(x.x.to_f64_lossy(), x.y.to_f64_lossy())),
    }
    let frame = LocalFrame::new(&pair.source, x)?;
    let phi = frame.coordinates();
    let grad = mv_coordinate_gradients(&frame);
    let q = pair.target.vertices();
    let n = q.len();
    let mut sum = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                sum = sum + triple_determinant(&phi, &grad, (i, j, k)) * signed_area(q[i], q[j], q[k]);
            }
        }
    }
    Ok(JacobianValue(T::two() * sum))
}

/// Jacobian `f_x x f_y` assembled directly from coordinate gradients.
pub fn jacobian_from_gradients<T: Scalar>(grad: &GradientSet<T>, target: &Polygon<T>) -> JacobianValue<T> {
    let (fx, fy) = grad.combine(target.vertices());
    JacobianValue(fx.cross(fy))
}

/// Closed-form determinants for a quadrilateral at an interior point:
///
/// ```text
/// D_i = ((t_{i-2} + t_{i-1}) u_i + (t_i + t_{i+1}) u_{i-1})
///       / (2 W^2 r_{i-1} r_i r_{i+1})
/// ```
pub fn quad_interior_d<T: Scalar>(frame: &LocalFrame<T>) -> Result<QuadDeterminants<T>> {
    if frame.len() != 4 {
        return Err(Error::NotQuadrilateral(frame.len()));
    }
    let t = frame.t();
    let u = frame.u();
    let r = frame.r();
    let w2 = frame.w_sum() * frame.w_sum();
    let mut d = [T::zero(); 4];
    for (i, di) in d.iter_mut().enumerate() {
        let (im2, im1, ip1) = ((i + 2) % 4, (i + 3) % 4, (i + 1) % 4);
        let num = (t[im2] + t[im1]) * u[i] + (t[i] + t[ip1]) * u[im1];
        *di = num / (T::two() * w2 * r[im1] * r[i] * r[ip1]);
    }
    Ok(QuadDeterminants {
        d,
        location: QuadLocation::Interior,
    })
}

/// Determinants at a point in the relative interior of edge `edge` of a
/// quadrilateral, as the limit from inside:
///
/// ```text
/// D_edge     = w_{edge-1}(y) / (2 |p_{edge+1} - p_edge|)
/// D_{edge+1} = w_{edge+2}(y) / (2 |p_{edge+1} - p_edge|)
/// ```
///
/// and zero for the other two. Both weights avoid the tangent of the edge
/// itself, which is infinite on the edge, so they are evaluated directly.
pub fn quad_boundary_d<T: Scalar>(
    quad: &Polygon<T>,
    edge: usize,
    mu: T,
) -> Result<QuadDeterminants<T>> {
    if quad.len() != 4 {
        return Err(Error::NotQuadrilateral(quad.len()));
    }
    if edge >= 4 {
        return Err(Error::IndexOutOfRange { index: edge, len: 4 });
    }
    if !(mu > T::zero() && mu < T::one()) {
        return Err(Error::VertexParameter(mu.to_f64_lossy()));
    }
    let (a, b) = quad.edge(edge);
    let y = a.lerp(b, mu);
    let len = (b - a).norm();

    let verts = quad.vertices();
    let mut r = [T::zero(); 4];
    let mut e = [Vec2::zero(); 4];
    for i in 0..4 {
        let d = verts[i] - y;
        r[i] = d.norm();
        e[i] = d / r[i];
    }
    let tangent = |j: usize| half_tangent(e[j].dot(e[(j + 1) % 4]), e[j].cross(e[(j + 1) % 4]));
    let weight = |i: usize| -> Result<T> {
        let prev = (i + 3) % 4;
        debug_assert!(i != edge && prev != edge);
        Ok((tangent(prev)? + tangent(i)?) / r[i])
    };

    let before = (edge + 3) % 4;
    let after = (edge + 2) % 4;
    let mut d = [T::zero(); 4];
    d[edge] = weight(before)? / (T::two() * len);
    d[(edge + 1) % 4] = weight(after)? / (T::two() * len);
    Ok(QuadDeterminants {
        d,
        location: QuadLocation::Edge { edge, mu },
    })
}

/// Signed-area ratio `A(q_{i-1}, q_i, q_{i+1}) / A(p_{i-1}, p_i, p_{i+1})`.
///
/// This is the Jacobian at `p_i` of any barycentric mapping that is C1
/// there. Mean value coordinates are not C1 at vertices, so for them the
/// value only signals which way the corner turns.
pub fn vertex_jacobian<T: Scalar>(pair: &MappingPair<T>, i: usize) -> Result<JacobianValue<T>> {
    let n = pair.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let src = pair.source.corner_area(i);
    let d = pair.source.diameter();
    if src.abs() <= T::lit(1e-12) * d * d {
        return Err(Error::DegenerateCorner(i));
    }
    Ok(JacobianValue(pair.target.corner_area(i) / src))
}

/// True when every triple determinant condition for a positive Jacobian is
/// satisfiable, i.e. the target is convex.
pub fn target_is_convex<T: Scalar>(pair: &MappingPair<T>) -> bool {
    is_convex(&pair.target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordinates::{local_frame, mv_coordinates};
    use crate::geometry::perp;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn poly(c: &[[f64; 2]]) -> Polygon<f64> {
        Polygon::from_coords(c).unwrap()
    }

    fn square() -> Polygon<f64> {
        poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    fn concave() -> Polygon<f64> {
        poly(&[[0.0, 0.0], [2.0, 0.0], [0.75, 0.75], [0.0, 2.0]])
    }

    /// Cofactor expansion along the first column, a different expansion
    /// order from `det3`.
    fn cofactor_det(m: [[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[1][0] * (m[0][1] * m[2][2] - m[0][2] * m[2][1])
            + m[2][0] * (m[0][1] * m[1][2] - m[0][2] * m[1][1])
    }

    fn fd_jacobian(pair: &MappingPair<f64>, x: Vec2<f64>, h: f64) -> f64 {
        let f = |p: Vec2<f64>| {
            mv_coordinates(pair.source(), p)
                .unwrap()
                .combine(pair.target().vertices())
        };
        let fx = (f(x + v(h, 0.0)) - f(x - v(h, 0.0))) / (2.0 * h);
        let fy = (f(x + v(0.0, h)) - f(x - v(0.0, h))) / (2.0 * h);
        fx.cross(fy)
    }

    #[test]
    fn det3_examples() {
        assert_eq!(det3([1.0, 0.0, 0.0], [v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)]), 1.0);
        let g = v(0.3, -1.2);
        assert_eq!(det3([0.4, 0.4, 2.0], [g, g, v(5.0, 1.0)]), 0.0);
        let mut seed = 1u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..100 {
            let vals = [rnd(), rnd(), rnd()];
            let gs = [v(rnd(), rnd()), v(rnd(), rnd()), v(rnd(), rnd())];
            let m = [
                [vals[0], vals[1], vals[2]],
                [gs[0].x, gs[1].x, gs[2].x],
                [gs[0].y, gs[1].y, gs[2].y],
            ];
            assert!((det3(vals, gs) - cofactor_det(m)).abs() < 1e-14);
        }
        // Unit values reduce to the cross-difference form.
        let gs = [v(0.1, 0.2), v(-0.7, 0.4), v(0.3, 0.9)];
        let expect = (gs[1] - gs[0]).cross(gs[2] - gs[0]);
        assert!((det3([1.0, 1.0, 1.0], gs) - expect).abs() < 1e-15);
    }

    #[test]
    fn identity_and_affine_jacobians() {
        let sq = square();
        let id = MappingPair::identity(sq.clone());
        for x in [v(0.5, 0.5), v(0.1, 0.8), v(0.93, 0.02)] {
            assert!((jacobian_via_triples(&id, x).unwrap().value() - 1.0).abs() < 1e-12);
        }
        // Linear map with determinant 2 * 1.5 - 0.5 * 0.25.
        let lin = |p: Vec2<f64>| v(2.0 * p.x + 0.5 * p.y, 0.25 * p.x + 1.5 * p.y);
        let det = 2.0 * 1.5 - 0.5 * 0.25;
        let quad = concave();
        let pair = MappingPair::new(quad.clone(), quad.map_vertices(lin).unwrap()).unwrap();
        for x in [v(0.3, 0.3), v(1.5, 0.2), v(0.2, 1.5)] {
            assert!((jacobian_via_triples(&pair, x).unwrap().value() - det).abs() < 1e-11);
        }
    }

    #[test]
    fn triples_match_finite_differences() {
        let p = poly(&[[0.1, 0.0], [2.0, 0.3], [1.7, 1.9], [-0.2, 1.2]]);
        let q = poly(&[[0.0, 0.0], [1.0, -0.2], [1.4, 1.0], [0.2, 0.8]]);
        let pair = MappingPair::new(p, q).unwrap();
        let h = 1e-6 * pair.source().diameter();
        for x in [v(0.5, 0.5), v(1.5, 1.2), v(0.2, 0.9)] {
            let j = jacobian_via_triples(&pair, x).unwrap().value();
            let fd = fd_jacobian(&pair, x, h);
            assert!((j - fd).abs() <= 1e-5 * fd.abs(), "{j} vs {fd}");
        }
    }

    #[test]
    fn closed_form_matches_det3_oracle() {
        for (quad, x) in [(square(), v(0.5, 0.5)), (concave(), v(0.3, 0.3)), (concave(), v(1.5, 0.2))] {
            let frame = local_frame(&quad, x).unwrap();
            let qd = quad_interior_d(&frame).unwrap();
            let phi = frame.coordinates();
            let g = mv_coordinate_gradients(&frame);
            for i in 0..4 {
                let oracle = triple_determinant(&phi, &g, ((i + 3) % 4, i, (i + 1) % 4));
                assert!((qd.d[i] - oracle).abs() <= 1e-10 * oracle.abs());
                assert!(qd.d[i] > 0.0);
            }
        }
        let frame = local_frame(&square(), v(0.5, 0.5)).unwrap();
        let qd = quad_interior_d(&frame).unwrap();
        for i in 1..4 {
            assert!((qd.d[i] - qd.d[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_determinants_unit_square() {
        let qd = quad_boundary_d(&square(), 0, 0.5).unwrap();
        // w_4(y) = (t_3 + t_4) / r_4 with t_3 = 1/2, t_4 = (sqrt 5 - 1)/2,
        // r_4 = sqrt(5)/2, over twice the unit edge length.
        let t3 = 0.5;
        let t4 = (5f64.sqrt() - 1.0) / 2.0;
        let r4 = 1.25f64.sqrt();
        let expect = (t3 + t4) / r4 / 2.0;
        assert!((expect - 0.5).abs() < 1e-15);
        assert!((qd.d[0] - 0.5).abs() < 1e-12);
        assert!((qd.d[1] - 0.5).abs() < 1e-12);
        assert_eq!(qd.d[2], 0.0);
        assert_eq!(qd.d[3], 0.0);
        // Identity mapping has J = 1 on the boundary too.
        assert!((qd.jacobian(&square()).value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_determinants_errors_and_pattern() {
        assert_eq!(quad_boundary_d(&square(), 0, 0.0), Err(Error::VertexParameter(0.0)));
        assert_eq!(quad_boundary_d(&square(), 1, 1.0), Err(Error::VertexParameter(1.0)));
        let quad = concave();
        for edge in 0..4 {
            let qd = quad_boundary_d(&quad, edge, 0.37).unwrap();
            for i in 0..4 {
                if i == edge || i == (edge + 1) % 4 {
                    assert!(qd.d[i] > 0.0);
                } else {
                    assert_eq!(qd.d[i], 0.0);
                }
            }
        }
    }

    #[test]
    fn boundary_limit_from_inside() {
        let quad = concave();
        let d = quad.diameter();
        for edge in 0..4 {
            let (a, b) = quad.edge(edge);
            let mu = 0.4;
            let y = a.lerp(b, mu);
            let inward = perp(b - a) / (b - a).norm();
            let target = quad_boundary_d(&quad, edge, mu).unwrap();
            let mut last = f64::INFINITY;
            for k in [1e-2, 1e-3, 1e-4] {
                let frame = local_frame(&quad, y + inward * (k * d)).unwrap();
                let qd = quad_interior_d(&frame).unwrap();
                let err = (0..4)
                    .map(|i| (qd.d[i] - target.d[i]).abs())
                    .fold(0.0, f64::max);
                assert!(err < last, "edge {edge}: {err} !< {last}");
                last = err;
            }
        }
    }

    #[test]
    fn vertex_jacobian_examples() {
        let sq = square();
        let id = MappingPair::identity(sq.clone());
        let scaled = MappingPair::new(sq.clone(), sq.map_vertices(|p| p * 2.0).unwrap()).unwrap();
        for i in 0..4 {
            assert_eq!(vertex_jacobian(&id, i).unwrap().value(), 1.0);
            assert_eq!(vertex_jacobian(&scaled, i).unwrap().value(), 4.0);
        }
        let mixed = MappingPair::new(sq, concave()).unwrap();
        let signs: Vec<bool> = (0..4)
            .map(|i| vertex_jacobian(&mixed, i).unwrap().is_positive())
            .collect();
        assert_eq!(signs, vec![true, true, false, true]);

        let flat = poly(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 1.0]]);
        let pair = MappingPair::identity(flat);
        assert_eq!(vertex_jacobian(&pair, 1), Err(Error::DegenerateCorner(1)));
    }

    #[test]
    fn pair_validation() {
        let tri = poly(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(
            MappingPair::new(square(), tri),
            Err(Error::VertexCountMismatch(4, 3))
        );
        let cw = poly(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]);
        assert_eq!(MappingPair::new(square(), cw), Err(Error::OrientationMismatch));
    }
}
