//! Subcommands of the `mvmap` binary.

use std::fmt;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mvmap::{
    counterexample_search, deform, injectivity_report_with, jacobian_field_with, CoordinateKind, DeformationJob,
    Payload, Point64, Resolution, SearchOptions, Verdict,
};
use serde::Serialize;

use crate::scene::Scene;
use crate::service::{self, FieldResponse, ReportJson};
use crate::{figure, json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NON_INJECTIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const DEFAULT_PORT: u16 = 7878;

#[derive(Debug, Parser)]
#[command(name = "mvmap", version, about = "Mean value mappings between polygons")]
pub struct Cli {
    /// Boundary tolerance for locating points (overrides the scene).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Coordinate family (overrides the scene).
    #[arg(long, global = true, value_enum)]
    pub kind: Option<KindArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Mv,
    Wachspress,
}

impl From<KindArg> for CoordinateKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Mv => CoordinateKind::MeanValue,
            KindArg::Wachspress => CoordinateKind::Wachspress,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coordinates and their gradients at a point of the source.
    Coords {
        scene: PathBuf,
        /// Evaluation point as `x,y`.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Point64,
        #[arg(long)]
        json: bool,
    },
    /// Map the scene payload through the mapping.
    Map {
        scene: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Sample the Jacobian on a grid over the source bounding box.
    Field {
        scene: PathBuf,
        /// Grid nodes as `ROWSxCOLS`.
        #[arg(long, value_parser = parse_resolution)]
        res: Option<Resolution>,
        #[arg(long, value_enum, default_value_t = FieldFormat::Text)]
        format: FieldFormat,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Injectivity report. Exit 0: injective evidence, 2: non-injective,
    /// 3: inconclusive.
    Check {
        scene: PathBuf,
        #[arg(long, value_parser = parse_resolution)]
        res: Option<Resolution>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search random convex pairs for a negative mean value Jacobian.
    Search {
        /// Vertex count, at least 5.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Where to write the scene; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Render the cages, the payload and its image as SVG.
    Figure {
        scene: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Start the local JSON service on 127.0.0.1.
    Serve {
        #[arg(long, env = "MVMAP_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<mvmap::Error> for CliError {
    fn from(e: mvmap::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

fn parse_point(s: &str) -> Result<Point64, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got '{s}'"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let pt = Point64::new(p(x)?, p(y)?);
    if pt.is_finite() {
        Ok(pt)
    } else {
        Err(format!("non-finite point '{s}'"))
    }
}

fn parse_resolution(s: &str) -> Result<Resolution, String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected RxC, got '{s}'"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Resolution::new(p(r)?, p(c)?).map_err(|e| e.to_string())
}

/// Reads a scene and applies the global overrides.
pub fn load_scene(path: &Path, cli: &Cli) -> Result<Scene, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    let mut scene = Scene::parse(&text).map_err(|e| CliError(format!("{}:{}: {}", path.display(), e.line, e.message)))?;
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError(format!("--tol must be finite and non-negative, got {t}")));
        }
        scene.tolerance = Some(t);
    }
    if let Some(k) = cli.kind {
        scene.kind = k.into();
    }
    Ok(scene)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

#[derive(Serialize)]
struct MapOutput {
    points: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed: Option<bool>,
}

#[derive(Serialize)]
struct CoordsOutput {
    point: [f64; 2],
    phi: Vec<f64>,
    grad_phi: Option<Vec<[f64; 2]>>,
}

/// Exit status for a verdict.
pub fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::InjectiveEvidence => EXIT_OK,
        Verdict::NonInjective => EXIT_NON_INJECTIVE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Runs one command, writing results to `out` and notes to `err`. Returns
/// the exit status; `Err` means exit 1.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Coords { scene, at, json } => {
            let s = load_scene(scene, cli)?;
            let (phi, grad) = service::coordinates_at(s.pair.source(), s.kind, *at, s.tol())?;
            if *json {
                let o = CoordsOutput {
                    point: (*at).into(),
                    phi,
                    grad_phi: grad.map(|g| g.into_iter().map(Into::into).collect()),
                };
                out.write_all(json::to_string(&o).as_bytes())?;
            } else {
                writeln!(out, "# {} coordinates at ({}, {})", s.kind, at.x, at.y)?;
                writeln!(out, "# i phi dphi/dx dphi/dy")?;
                for (i, p) in phi.iter().enumerate() {
                    match &grad {
                        Some(g) => writeln!(out, "{i} {p:.17e} {:.17e} {:.17e}", g[i].x, g[i].y)?,
                        None => writeln!(out, "{i} {p:.17e} - -")?,
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Map { scene, out: path } => {
            let s = load_scene(scene, cli)?;
            let payload = s.payload.clone().ok_or_else(|| CliError(format!("{}: scene has no payload", scene.display())))?;
            let closed = match &payload {
                Payload::Polyline { closed, .. } => Some(*closed),
                _ => None,
            };
            let mut job = DeformationJob::new(s.pair.clone(), payload);
            job.kind = s.kind;
            job.tol = Some(s.tol());
            let points = deform(&job)?.into_iter().map(Into::into).collect();
            emit(out, path.as_deref(), &json::to_string(&MapOutput { points, closed }))?;
            Ok(EXIT_OK)
        }
        Command::Field { scene, res, format, out: path } => {
            let s = load_scene(scene, cli)?;
            let f = jacobian_field_with(&s.pair, s.kind, res.unwrap_or(s.resolution))?;
            let text = match format {
                FieldFormat::Json => json::to_string(&FieldResponse::new(&f)),
                FieldFormat::Text => field_text(&f),
            };
            emit(out, path.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Check { scene, res, out: path } => {
            let s = load_scene(scene, cli)?;
            let r = injectivity_report_with(&s.pair, s.kind, res.unwrap_or(s.resolution))?;
            let report = ReportJson::new(&r, |i| service::input_index(s.pair.source(), i));
            emit(out, path.as_deref(), &json::to_string(&report))?;
            writeln!(err, "{}: {} (min J = {:e})", scene.display(), r.verdict, r.min_jacobian)?;
            Ok(verdict_exit(r.verdict))
        }
        Command::Search { n, trials, seed, out: path } => {
            let found = counterexample_search::<f64>(SearchOptions::new(*n, *trials, *seed))?;
            match found {
                Some(c) => {
                    writeln!(
                        err,
                        "found at trial {}: J = {:e} at ({}, {}), finite differences {:e}",
                        c.trial, c.jacobian, c.witness.x, c.witness.y, c.fd_jacobian
                    )?;
                    emit(out, path.as_deref(), &Scene::new(c.pair).to_json())?;
                }
                None => writeln!(err, "none found in {trials} trials (n = {n}, seed {seed})")?,
            }
            Ok(EXIT_OK)
        }
        Command::Figure { scene, out: path } => {
            let s = load_scene(scene, cli)?;
            let fig = figure::render(&s)?;
            std::fs::write(path, &fig.svg).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            writeln!(
                out,
                "{}: {} image points, {} image self-intersections",
                path.display(),
                fig.image.len(),
                fig.image_crossings.len()
            )?;
            Ok(EXIT_OK)
        }
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new()?;
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, *port));
            rt.block_on(service::serve(addr, |a| {
                let _ = writeln!(out, "listening on http://{a}");
                let _ = out.flush();
            }))?;
            Ok(EXIT_OK)
        }
    }
}

fn field_text(f: &mvmap::JacobianField64) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {} jacobian {} over [{}, {}] x [{}, {}], first line is the bottom row, '-' where undefined",
        f.kind, f.resolution, f.bbox.min.x, f.bbox.max.x, f.bbox.min.y, f.bbox.max.y
    );
    if let Some((v, p, _)) = f.min() {
        let _ = writeln!(s, "# min {v:.17e} at ({}, {})", p.x, p.y);
    }
    for row in f.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.map_or_else(|| "-".to_string(), |v| format!("{v:.9e}")))
            .collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points_and_resolutions() {
        assert_eq!(parse_point("-0.5, 2").unwrap(), Point64::new(-0.5, 2.0));
        assert!(parse_point("1;2").is_err());
        assert!(parse_point("inf,0").is_err());
        assert_eq!(parse_resolution("30x40").unwrap(), Resolution::new(30, 40).unwrap());
        assert!(parse_resolution("1x40").is_err());
        assert!(parse_resolution("40").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_coordinates_parse_as_values() {
        let cli = Cli::try_parse_from(["mvmap", "coords", "s.json", "--at", "-1,-2"]).unwrap();
        match cli.command {
            Command::Coords { at, .. } => assert_eq!(at, Point64::new(-1.0, -2.0)),
            _ => unreachable!(),
        }
    }
}
