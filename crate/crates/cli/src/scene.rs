//! Scene files: a source and target cage, an optional payload and options.
//!
//! ```json
//! {
//!   "source": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
//!   "target": [[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]],
//!   "payload": {"type": "polyline", "points": [[0.2, 0.2], [0.8, 0.5]], "closed": false},
//!   "options": {"resolution": {"rows": 200, "cols": 200}, "tolerance": 1e-12, "coordinates": "mv"}
//! }
//! ```

use std::fmt;

use mvmap::{CoordinateKind, Error, MappingPair64, Payload, Point64, Polygon64, Resolution};
use serde::{Deserialize, Serialize};

use crate::json;

/// Coordinate family as written in scenes and requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindName {
    Mv,
    Wachspress,
}

impl From<KindName> for CoordinateKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::Mv => CoordinateKind::MeanValue,
            KindName::Wachspress => CoordinateKind::Wachspress,
        }
    }
}

impl From<CoordinateKind> for KindName {
    fn from(k: CoordinateKind) -> Self {
        match k {
            CoordinateKind::MeanValue => KindName::Mv,
            CoordinateKind::Wachspress => KindName::Wachspress,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSpec {
    pub rows: usize,
    pub cols: usize,
}

impl From<Resolution> for ResolutionSpec {
    fn from(r: Resolution) -> Self {
        Self { rows: r.rows, cols: r.cols }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PayloadSpec {
    Points {
        points: Vec<[f64; 2]>,
    },
    Polyline {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        closed: bool,
    },
}

impl PayloadSpec {
    pub fn points(&self) -> &[[f64; 2]] {
        match self {
            PayloadSpec::Points { points } | PayloadSpec::Polyline { points, .. } => points,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<KindName>,
}

impl SceneOptions {
    fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// The on-disk form, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub source: Vec<[f64; 2]>,
    pub target: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<PayloadSpec>,
    #[serde(default, skip_serializing_if = "SceneOptions::is_default")]
    pub options: SceneOptions,
}

/// A validated scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub pair: MappingPair64,
    pub payload: Option<Payload<f64>>,
    pub resolution: Resolution,
    pub tolerance: Option<f64>,
    pub kind: CoordinateKind,
}

/// Parse or validation failure, with the 1-based line it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for SceneError {}

impl Scene {
    pub fn new(pair: MappingPair64) -> Self {
        Self {
            pair,
            payload: None,
            resolution: Resolution::default(),
            tolerance: None,
            kind: CoordinateKind::MeanValue,
        }
    }

    /// Parses and validates scene JSON.
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| SceneError {
            line: e.line().max(1),
            message: e.to_string(),
        })?;
        Self::validate(&file, text)
    }

    /// Validates `file`; `text` is only used to find line numbers.
    pub fn validate(file: &SceneFile, text: &str) -> Result<Self, SceneError> {
        let at = |line: usize, message: String| SceneError { line, message };
        let source = polygon(&file.source)
            .map_err(|e| at(polygon_error_line(text, "source", &e), format!("source polygon: {e}")))?;
        let target = polygon(&file.target)
            .map_err(|e| at(polygon_error_line(text, "target", &e), format!("target polygon: {e}")))?;
        let pair = MappingPair64::new(source, target).map_err(|e| at(key_line(text, "target"), e.to_string()))?;

        let resolution = match file.options.resolution {
            Some(r) => Resolution::new(r.rows, r.cols).map_err(|e| at(key_line(text, "resolution"), e.to_string()))?,
            None => Resolution::default(),
        };
        if let Some(t) = file.options.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(at(key_line(text, "tolerance"), format!("tolerance must be finite and non-negative, got {t}")));
            }
        }
        let tol = file.options.tolerance.unwrap_or_else(|| pair.source().default_tolerance());

        let payload = match &file.payload {
            None => None,
            Some(spec) => {
                for (i, &p) in spec.points().iter().enumerate() {
                    if pair.source().locate_with(Point64::from(p), tol).is_exterior() {
                        return Err(at(
                            vertex_line(text, "points", i),
                            format!("payload point {i} ({}, {}) lies outside the source polygon", p[0], p[1]),
                        ));
                    }
                }
                Some(match spec {
                    PayloadSpec::Points { points } => Payload::Points(to_points(points)),
                    PayloadSpec::Polyline { points, closed } => Payload::Polyline {
                        points: to_points(points),
                        closed: *closed,
                    },
                })
            }
        };

        Ok(Self {
            pair,
            payload,
            resolution,
            tolerance: file.options.tolerance,
            kind: file.options.coordinates.map(Into::into).unwrap_or_default(),
        })
    }

    pub fn to_file(&self) -> SceneFile {
        let coords = |p: &Polygon64| p.vertices().iter().map(|&v| v.into()).collect();
        let payload = self.payload.as_ref().and_then(|p| match p {
            Payload::Points(pts) => Some(PayloadSpec::Points { points: from_points(pts) }),
            Payload::Polyline { points, closed } => Some(PayloadSpec::Polyline {
                points: from_points(points),
                closed: *closed,
            }),
            Payload::Grid { .. } => None,
        });
        SceneFile {
            source: coords(self.pair.source()),
            target: coords(self.pair.target()),
            payload,
            options: SceneOptions {
                resolution: (self.resolution != Resolution::default()).then(|| self.resolution.into()),
                tolerance: self.tolerance,
                coordinates: (self.kind != CoordinateKind::default()).then(|| self.kind.into()),
            },
        }
    }

    /// Scene JSON with 17 significant digits.
    pub fn to_json(&self) -> String {
        json::to_string(&self.to_file())
    }

    /// Locate tolerance: the override if set, else the source default.
    pub fn tol(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.pair.source().default_tolerance())
    }
}

fn polygon(coords: &[[f64; 2]]) -> mvmap::Result<Polygon64> {
    Polygon64::from_coords(coords)
}

fn to_points(points: &[[f64; 2]]) -> Vec<Point64> {
    points.iter().map(|&p| p.into()).collect()
}

fn from_points(points: &[Point64]) -> Vec<[f64; 2]> {
    points.iter().map(|&p| p.into()).collect()
}

fn polygon_error_line(text: &str, key: &str, e: &Error) -> usize {
    match *e {
        Error::NonFinite(i) | Error::RepeatedVertex(_, i) | Error::SelfIntersecting(i, _) => vertex_line(text, key, i),
        _ => key_line(text, key),
    }
}

/// Line of the first `"key"` in `text`, or 1.
fn key_line(text: &str, key: &str) -> usize {
    key_offset(text, key).map_or(1, |o| line_of(text, o))
}

fn key_offset(text: &str, key: &str) -> Option<usize> {
    text.find(&format!("\"{key}\""))
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Line of the `index`-th `[x, y]` pair in the array following `"key"`.
fn vertex_line(text: &str, key: &str, index: usize) -> usize {
    let Some(start) = key_offset(text, key) else {
        return 1;
    };
    let mut depth = 0usize;
    let mut seen = 0usize;
    for (o, b) in text[start..].bytes().enumerate() {
        match b {
            b'[' => {
                depth += 1;
                if depth == 2 {
                    if seen == index {
                        return line_of(text, start + o);
                    }
                    seen += 1;
                }
            }
            b']' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    break;
                }
            }
            _ => {}
        }
    }
    line_of(text, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = r#"{
  "source": [[0, 0], [1, 0], [1, 1], [0, 1]],
  "target": [[0, 0], [2, 0], [2, 2], [0, 2]],
  "payload": {"type": "points", "points": [[0.5, 0.5]]}
}"#;

    #[test]
    fn parses_minimal_scene() {
        let s = Scene::parse(SQUARE).unwrap();
        assert_eq!(s.pair.len(), 4);
        assert_eq!(s.resolution, Resolution::default());
        assert_eq!(s.kind, CoordinateKind::MeanValue);
        assert_eq!(s.payload, Some(Payload::Points(vec![Point64::new(0.5, 0.5)])));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut s = Scene::parse(SQUARE).unwrap();
        s.pair = MappingPair64::new(
            Polygon64::from_coords(&[[0.1, 0.2], [1.0 / 3.0, 0.0], [1.0, 2.0f64.sqrt()], [0.0, 1.0]]).unwrap(),
            Polygon64::from_coords(&[[0.0, 0.0], [std::f64::consts::PI, 1e-300], [3.5, 2.0], [0.1, 7.0]]).unwrap(),
        )
        .unwrap();
        s.tolerance = Some(1e-9);
        s.kind = CoordinateKind::Wachspress;
        s.resolution = Resolution::new(17, 3).unwrap();
        let text = s.to_json();
        assert_eq!(Scene::parse(&text).unwrap(), s);
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = Scene::parse("{\n  \"source\": [[0, 0],\n  oops\n}").unwrap_err();
        assert_eq!(e.line, 3);
        let e = Scene::parse("{\n \"source\": [],\n \"target\": [],\n \"bogus\": 1\n}").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn validation_errors_point_at_the_vertex() {
        let text = "{\n \"source\": [\n  [0, 0],\n  [2, 0],\n  [1, 1],\n  [2, 2]\n ],\n \"target\": [[0,0],[1,0],[1,1],[0,1]]\n}";
        let e = Scene::parse(text).unwrap_err();
        assert_eq!(e.line, 4, "{e}");
        assert!(e.message.contains("source polygon"));

        let text = "{\n \"source\": [[0,0],[1,0],[1,1],[0,1]],\n \"target\": [[0,0],[1,0],[1,1]]\n}";
        assert_eq!(Scene::parse(text).unwrap_err().line, 3);

        let text = "{\n \"source\": [[0,0],[1,0],[1,1],[0,1]],\n \"target\": [[0,0],[1,0],[1,1],[0,1]],\n \"payload\": {\"type\": \"points\", \"points\": [\n  [0.5, 0.5],\n  [3, 3]\n ]}\n}";
        let e = Scene::parse(text).unwrap_err();
        assert_eq!(e.line, 6, "{e}");
    }

    #[test]
    fn bad_options_are_rejected() {
        let base = "{\"source\": [[0,0],[1,0],[0,1]], \"target\": [[0,0],[1,0],[0,1]],\n \"options\": ";
        for opt in [r#"{"resolution": {"rows": 1, "cols": 5}}"#, r#"{"tolerance": -1}"#, r#"{"coordinates": "bezier"}"#] {
            let e = Scene::parse(&format!("{base}{opt}}}")).unwrap_err();
            assert_eq!(e.line, 2, "{e}");
        }
    }
}
