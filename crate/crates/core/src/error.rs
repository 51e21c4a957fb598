use thiserror::Error;

/// Errors raised by polygon construction, coordinate evaluation and mapping.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("polygon has zero signed area")]
    ZeroArea,
    #[error("polygons have different vertex counts ({0} and {1})")]
    VertexCountMismatch(usize, usize),
    #[error("source and target polygons have opposite orientations")]
    OrientationMismatch,
    #[error("point ({0}, {1}) lies outside the polygon")]
    ExteriorPoint(f64, f64),
    #[error("point ({0}, {1}) lies on the polygon boundary")]
    BoundaryPoint(f64, f64),
    #[error("half-angle tangent is singular (1 + cos = {0})")]
    SingularAngle(f64),
    #[error("operation requires a convex polygon")]
    NonConvex,
    #[error("operation requires a quadrilateral, got {0} vertices")]
    NotQuadrilateral(usize),
    #[error("corner at vertex {0} is degenerate")]
    DegenerateCorner(usize),
    #[error("edge parameter {0} is not strictly inside (0, 1)")]
    VertexParameter(f64),
    #[error("index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("grid resolution must be at least 2 per axis, got {0}x{1}")]
    InvalidResolution(usize, usize),
    #[error("counterexample search needs n >= 5, got {0}")]
    SearchTooFewVertices(usize),
    #[error("{} payload point(s) failed, first at index {}: {}", .0.len(), .0[0].0, .0[0].1)]
    Payload(Vec<(usize, Error)>),
}

pub type Result<T> = std::result::Result<T, Error>;
