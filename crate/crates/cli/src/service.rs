//! Stateless JSON service used by the editor.
//!
//! | route          | request                                | response                                  |
//! |----------------|----------------------------------------|-------------------------------------------|
//! | `POST /coords` | `{polygon, point, kind?, tol?}`        | `{phi, grad_phi}` (`grad_phi` null off the interior) |
//! | `POST /map`    | `{source, target, points, kind?, tol?}`| `{points}`                                |
//! | `POST /field`  | `{source, target, res?, kind?}`        | `{grid, bbox, min, argmin, resolution, kind}` |
//! | `POST /check`  | `{source, target, res?, kind?}`        | injectivity report                        |
//!
//! Domain failures (exterior point, invalid polygon, ...) answer 200 with
//! `{"error": {"code", "message", "failures"?}}`. Malformed JSON or schema
//! violations answer 400 with the same envelope and code `"schema"`.
//! Vertex indices are 0-based and refer to the order given in the request.

use std::net::SocketAddr;

use axum::body::Bytes;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use mvmap::{
    deform, injectivity_report_with, interior_coordinates, jacobian_field_with, CoordinateKind,
    CoordinateSet, DeformationJob, EdgeLocation, Error, InjectivityReport64, JacobianField64, MappingPair64,
    Payload, Point64, Polygon64, Resolution,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::json;
use crate::scene::{KindName, ResolutionSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordsRequest {
    pub polygon: Vec<[f64; 2]>,
    pub point: [f64; 2],
    #[serde(default)]
    pub kind: Option<KindName>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordsResponse {
    pub phi: Vec<f64>,
    pub grad_phi: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRequest {
    pub source: Vec<[f64; 2]>,
    pub target: Vec<[f64; 2]>,
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub kind: Option<KindName>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapResponse {
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRequest {
    pub source: Vec<[f64; 2]>,
    pub target: Vec<[f64; 2]>,
    #[serde(default)]
    pub res: Option<ResolutionSpec>,
    #[serde(default)]
    pub kind: Option<KindName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BBoxJson {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

/// Jacobian samples, one row per grid row from the bottom of the bounding
/// box up; `null` marks nodes outside the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldResponse {
    pub grid: Vec<Vec<Option<f64>>>,
    pub bbox: BBoxJson,
    pub min: Option<f64>,
    pub argmin: Option<[f64; 2]>,
    pub resolution: ResolutionSpec,
    pub kind: KindName,
}

impl FieldResponse {
    pub fn new(field: &JacobianField64) -> Self {
        let min = field.min();
        Self {
            grid: field.rows().map(|r| r.to_vec()).collect(),
            bbox: BBoxJson {
                min: field.bbox.min.into(),
                max: field.bbox.max.into(),
            },
            min: min.map(|m| m.0),
            argmin: min.map(|m| m.1.into()),
            resolution: field.resolution.into(),
            kind: field.kind.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeJson {
    pub vertex: usize,
    pub distance: f64,
    pub point: [f64; 2],
    pub jacobian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub verdict: String,
    pub kind: KindName,
    pub min_jacobian: Option<f64>,
    pub argmin: [f64; 2],
    pub witness_fd: Option<f64>,
    pub negative_samples: usize,
    pub self_intersections: Vec<[usize; 2]>,
    pub samples: usize,
    pub resolution: ResolutionSpec,
    pub vertex_probes: Vec<ProbeJson>,
}

impl ReportJson {
    /// `vertex_order` maps stored vertex indices back to input order.
    pub fn new(r: &InjectivityReport64, vertex_order: impl Fn(usize) -> usize) -> Self {
        Self {
            verdict: r.verdict.to_string(),
            kind: r.kind.into(),
            min_jacobian: r.min_jacobian.is_finite().then_some(r.min_jacobian),
            argmin: r.argmin.into(),
            witness_fd: r.witness_fd,
            negative_samples: r.negative_samples,
            self_intersections: r.self_intersections.iter().map(|&(a, b)| [a, b]).collect(),
            samples: r.samples,
            resolution: r.resolution.into(),
            vertex_probes: r
                .vertex_probes
                .iter()
                .map(|p| ProbeJson {
                    vertex: vertex_order(p.vertex),
                    distance: p.distance,
                    point: p.point.into(),
                    jacobian: p.jacobian,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<PointFailure>,
}

impl ServiceError {
    pub fn schema(message: impl Into<String>) -> Self {
        Self {
            code: "schema".into(),
            message: message.into(),
            failures: Vec::new(),
        }
    }

    pub fn with_context(e: &Error, context: &str) -> Self {
        let failures = match e {
            Error::Payload(list) => list
                .iter()
                .map(|(i, e)| PointFailure {
                    index: *i,
                    code: error_code(e).into(),
                    message: e.to_string(),
                })
                .collect(),
            _ => Vec::new(),
        };
        Self {
            code: error_code(e).into(),
            message: if context.is_empty() { e.to_string() } else { format!("{context}: {e}") },
            failures,
        }
    }
}

impl From<Error> for ServiceError {
    fn from(e: Error) -> Self {
        Self::with_context(&e, "")
    }
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    error: &'a ServiceError,
}

/// Stable kebab-case name of a domain error.
pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::TooFewVertices(_) => "too-few-vertices",
        Error::NonFinite(_) => "non-finite",
        Error::RepeatedVertex(..) => "repeated-vertex",
        Error::SelfIntersecting(..) => "self-intersecting",
        Error::ZeroArea => "zero-area",
        Error::VertexCountMismatch(..) => "vertex-count-mismatch",
        Error::OrientationMismatch => "orientation-mismatch",
        Error::ExteriorPoint(..) => "exterior-point",
        Error::BoundaryPoint(..) => "boundary-point",
        Error::SingularAngle(_) => "singular-angle",
        Error::NonConvex => "non-convex",
        Error::NotQuadrilateral(_) => "not-quadrilateral",
        Error::DegenerateCorner(_) => "degenerate-corner",
        Error::VertexParameter(_) => "vertex-parameter",
        Error::IndexOutOfRange { .. } => "index-out-of-range",
        Error::InvalidResolution(..) => "invalid-resolution",
        Error::SearchTooFewVertices(_) => "search-too-few-vertices",
        Error::Payload(_) => "payload",
    }
}

type Outcome<T> = Result<T, ServiceError>;

fn polygon(coords: &[[f64; 2]], name: &str) -> Outcome<Polygon64> {
    Polygon64::from_coords(coords).map_err(|e| ServiceError::with_context(&e, &format!("{name} polygon")))
}

fn pair(source: &[[f64; 2]], target: &[[f64; 2]]) -> Outcome<MappingPair64> {
    Ok(MappingPair64::new(polygon(source, "source")?, polygon(target, "target")?)?)
}

fn kind(k: Option<KindName>) -> CoordinateKind {
    k.map(Into::into).unwrap_or_default()
}

fn tolerance(tol: Option<f64>, poly: &Polygon64) -> Outcome<f64> {
    match tol {
        Some(t) if !(t.is_finite() && t >= 0.0) => Err(ServiceError::schema(format!("tol must be finite and non-negative, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(poly.default_tolerance()),
    }
}

fn resolution(res: Option<ResolutionSpec>) -> Outcome<Resolution> {
    match res {
        Some(r) => Ok(Resolution::new(r.rows, r.cols)?),
        None => Ok(Resolution::default()),
    }
}

/// Maps a stored vertex index back to the caller's order; polygons given
/// clockwise are stored reversed around vertex 0.
pub fn input_index(poly: &Polygon64, i: usize) -> usize {
    if poly.was_flipped() {
        (poly.len() - i) % poly.len()
    } else {
        i
    }
}

/// Coordinates (and interior gradients) in the caller's vertex order.
pub fn coordinates_at(
    poly: &Polygon64,
    kind: CoordinateKind,
    x: Point64,
    tol: f64,
) -> mvmap::Result<(Vec<f64>, Option<Vec<Point64>>)> {
    let n = poly.len();
    if kind == CoordinateKind::Wachspress && !mvmap::is_convex(poly) {
        return Err(Error::NonConvex);
    }
    let (phi, grad) = match poly.locate_with(x, tol) {
        EdgeLocation::Interior => {
            let (c, g) = interior_coordinates(kind, poly, x)?;
            (c.phi, Some(g.grad_phi))
        }
        EdgeLocation::Vertex(i) => (CoordinateSet::at_vertex(n, i).phi, None),
        EdgeLocation::Edge { edge, mu } => (CoordinateSet::on_edge(n, edge, mu).phi, None),
        EdgeLocation::Exterior => return Err(Error::ExteriorPoint(x.x, x.y)),
    };
    Ok((in_input_order(poly, &phi), grad.map(|g| in_input_order(poly, &g))))
}

fn in_input_order<V: Copy>(poly: &Polygon64, values: &[V]) -> Vec<V> {
    (0..values.len()).map(|i| values[input_index(poly, i)]).collect()
}

pub fn coords(req: CoordsRequest) -> Outcome<CoordsResponse> {
    let poly = polygon(&req.polygon, "")?;
    let tol = tolerance(req.tol, &poly)?;
    let (phi, grad) = coordinates_at(&poly, kind(req.kind), req.point.into(), tol)?;
    Ok(CoordsResponse {
        phi,
        grad_phi: grad.map(|g| g.into_iter().map(Into::into).collect()),
    })
}

pub fn map(req: MapRequest) -> Outcome<MapResponse> {
    let pair = pair(&req.source, &req.target)?;
    let tol = tolerance(req.tol, pair.source())?;
    let points = req.points.iter().map(|&p| p.into()).collect();
    let mut job = DeformationJob::new(pair, Payload::Points(points));
    job.kind = kind(req.kind);
    job.tol = Some(tol);
    let out = deform(&job)?;
    Ok(MapResponse {
        points: out.into_iter().map(Into::into).collect(),
    })
}

pub fn field(req: PairRequest) -> Outcome<FieldResponse> {
    let pair = pair(&req.source, &req.target)?;
    let f = jacobian_field_with(&pair, kind(req.kind), resolution(req.res)?)?;
    Ok(FieldResponse::new(&f))
}

pub fn check(req: PairRequest) -> Outcome<ReportJson> {
    let pair = pair(&req.source, &req.target)?;
    let r = injectivity_report_with(&pair, kind(req.kind), resolution(req.res)?)?;
    Ok(ReportJson::new(&r, |i| input_index(pair.source(), i)))
}

fn run<Req: DeserializeOwned, Resp: Serialize>(body: &[u8], f: fn(Req) -> Outcome<Resp>) -> (u16, String) {
    let req = match serde_json::from_slice::<Req>(body) {
        Ok(r) => r,
        Err(e) => return (400, json::to_string(&ErrorEnvelope { error: &ServiceError::schema(e.to_string()) })),
    };
    match f(req) {
        Ok(resp) => (200, json::to_string(&resp)),
        Err(e) if e.code == "schema" => (400, json::to_string(&ErrorEnvelope { error: &e })),
        Err(e) => (200, json::to_string(&ErrorEnvelope { error: &e })),
    }
}

/// Answers one request without any transport: `(status, JSON body)`.
/// Unknown routes give 404.
pub fn handle(route: &str, body: &[u8]) -> (u16, String) {
    match route {
        "/coords" => run(body, coords),
        "/map" => run(body, map),
        "/field" => run(body, field),
        "/check" => run(body, check),
        _ => (
            404,
            json::to_string(&ErrorEnvelope {
                error: &ServiceError {
                    code: "not-found".into(),
                    message: format!("no route {route}"),
                    failures: Vec::new(),
                },
            }),
        ),
    }
}

async fn dispatch(route: &'static str, body: Bytes) -> Response {
    let (status, text) = tokio::task::spawn_blocking(move || handle(route, &body))
        .await
        .unwrap_or_else(|e| (500, format!("{{\"error\": {{\"code\": \"internal\", \"message\": \"{e}\"}}}}\n")));
    (
        StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
        [(header::CONTENT_TYPE, "application/json")],
        text,
    )
        .into_response()
}

pub fn router() -> Router {
    Router::new()
        .route("/coords", post(|b: Bytes| dispatch("/coords", b)))
        .route("/map", post(|b: Bytes| dispatch("/map", b)))
        .route("/field", post(|b: Bytes| dispatch("/field", b)))
        .route("/check", post(|b: Bytes| dispatch("/check", b)))
}

/// Serves on `addr` until the process ends. `ready` receives the bound
/// address, which differs from `addr` when port 0 is requested.
pub async fn serve(addr: SocketAddr, ready: impl FnOnce(SocketAddr)) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    ready(listener.local_addr()?);
    axum::serve(listener, router()).await
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(v: serde_json::Value) -> Vec<u8> {
        serde_json::to_vec(&v).unwrap()
    }

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn coords_unit_square_centre() {
        let (status, out) = handle(
            "/coords",
            &body(serde_json::json!({"polygon": [[0,0],[1,0],[1,1],[0,1]], "point": [0.5, 0.5]})),
        );
        assert_eq!(status, 200);
        let r: CoordsResponse = serde_json::from_str(&out).unwrap();
        for p in r.phi {
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert_eq!(r.grad_phi.unwrap().len(), 4);
    }

    #[test]
    fn clockwise_input_keeps_caller_order() {
        let ccw = coords(CoordsRequest {
            polygon: vec![[0.0, 0.0], [2.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            point: [0.3, 0.4],
            kind: None,
            tol: None,
        })
        .unwrap();
        let cw = coords(CoordsRequest {
            polygon: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0]],
            point: [0.3, 0.4],
            kind: None,
            tol: None,
        })
        .unwrap();
        let perm = [0, 3, 2, 1];
        for i in 0..4 {
            assert!((ccw.phi[perm[i]] - cw.phi[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_point_has_no_gradient() {
        let r = coords(CoordsRequest {
            polygon: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            point: [0.25, 0.0],
            kind: None,
            tol: None,
        })
        .unwrap();
        assert_eq!(r.phi, vec![0.75, 0.25, 0.0, 0.0]);
        assert!(r.grad_phi.is_none());
    }

    #[test]
    fn domain_errors_are_structured() {
        let (status, out) = handle(
            "/map",
            &body(serde_json::json!({
                "source": [[0,0],[1,0],[1,1],[0,1]],
                "target": [[0,0],[1,0],[1,1],[0,1]],
                "points": [[0.5, 0.5], [2, 2]]
            })),
        );
        assert_eq!(status, 200);
        let v = parse(&out);
        assert_eq!(v["error"]["code"], "payload");
        assert_eq!(v["error"]["failures"][0]["index"], 1);
        assert_eq!(v["error"]["failures"][0]["code"], "exterior-point");

        let (status, out) = handle(
            "/check",
            &body(serde_json::json!({"source": [[0,0],[2,0],[1,1],[2,2]], "target": [[0,0],[1,0],[1,1],[0,1]]})),
        );
        assert_eq!(status, 200);
        assert_eq!(parse(&out)["error"]["code"], "self-intersecting");
    }

    #[test]
    fn schema_errors_are_400() {
        for (route, b) in [
            ("/coords", &b"not json"[..]),
            ("/coords", br#"{"polygon": [[0,0]]}"#),
            ("/field", br#"{"source": [], "target": [], "extra": 1}"#),
            ("/map", br#"{"source": [[0,0],[1,0],[0,1]], "target": [[0,0],[1,0],[0,1]], "points": [], "tol": -1}"#),
        ] {
            let (status, out) = handle(route, b);
            assert_eq!(status, 400, "{route} {out}");
            assert_eq!(parse(&out)["error"]["code"], "schema");
        }
        assert_eq!(handle("/nope", b"{}").0, 404);
    }

    #[test]
    fn identical_requests_give_identical_responses() {
        let b = body(serde_json::json!({
            "source": [[0,0],[1,0],[1,1],[0,1]],
            "target": [[0,0],[2,0],[1.5,1],[0,1.2]],
            "res": {"rows": 12, "cols": 9}
        }));
        let a = handle("/field", &b);
        assert_eq!(a, handle("/field", &b));
        let f: FieldResponse = serde_json::from_str(&a.1).unwrap();
        assert_eq!(f.grid.len(), 12);
        assert_eq!(f.grid[0].len(), 9);
        assert!(f.min.unwrap() > 0.0);
    }
}
