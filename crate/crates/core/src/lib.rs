//! Mean value coordinates, their gradients, and Jacobians of barycentric
//! mappings between polygons.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`). The `*64` and
//! `*32` aliases below name the common instantiations.
//!
//! ```
//! use mvmap::{mv_coordinates, Point64, Polygon64};
//!
//! let square = Polygon64::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
//! let phi = mv_coordinates(&square, Point64::new(0.5, 0.5)).unwrap();
//! assert!(phi.phi.iter().all(|&p| (p - 0.25).abs() < 1e-15));
//! ```

pub mod coordinates;
pub mod error;
pub mod geometry;
pub mod jacobian;
pub mod mapping;
pub mod sampling;
pub mod scalar;

pub use coordinates::{
    half_tangent, interior_coordinates, local_frame, mv_coordinate_gradients, mv_coordinates,
    mv_coordinates_with, mv_weight_gradients, wachspress_coordinates, wachspress_gradients,
    CoordinateKind, CoordinateSet, GradientSet, LocalFrame, SINGULAR_ANGLE_THRESHOLD,
};
pub use error::{Error, Result};
pub use geometry::{
    cross, is_convex, is_convex_with, perp, random_convex_polygon, segments_properly_intersect,
    signed_area, BBox, EdgeLocation, Point2, Polygon, Vec2, Vector2,
};
pub use jacobian::{
    det3, jacobian_from_gradients, jacobian_via_triples, quad_boundary_d, quad_interior_d,
    triple_determinant, vertex_jacobian, JacobianValue, MappingPair, QuadDeterminants,
    QuadLocation,
};
pub use mapping::{
    boundary_distance, boundary_offset_curve, counterexample_search, deform,
    finite_difference_jacobian, grid_node, injectivity_report, injectivity_report_with,
    jacobian_at, jacobian_field, jacobian_field_with, local_scale, map_point, map_point_with,
    resample_closed, search_trial_pair, self_intersections, self_intersections_brute,
    Counterexample, DeformationJob, InjectivityReport, JacobianField, Payload, Resolution,
    SearchOptions, Verdict, VertexProbe, OFFSET_DISTANCE, OFFSET_SAMPLES, PROBE_DISTANCES,
};
pub use scalar::Scalar;

pub type Point64 = Point2<f64>;
pub type Vector64 = Vector2<f64>;
pub type Polygon64 = Polygon<f64>;
pub type MappingPair64 = MappingPair<f64>;
pub type CoordinateSet64 = CoordinateSet<f64>;
pub type GradientSet64 = GradientSet<f64>;
pub type JacobianField64 = JacobianField<f64>;
pub type InjectivityReport64 = InjectivityReport<f64>;

pub type Point32 = Point2<f32>;
pub type Vector32 = Vector2<f32>;
pub type Polygon32 = Polygon<f32>;
pub type MappingPair32 = MappingPair<f32>;
