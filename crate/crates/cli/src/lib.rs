//! Command-line surface of `mvmap`: scene files, SVG figures and the local
//! JSON service.

pub mod commands;
pub mod figure;
pub mod json;
pub mod scene;
pub mod service;

pub use commands::{execute, Cli, CliError, EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_NON_INJECTIVE, EXIT_OK};
pub use scene::{Scene, SceneError, SceneFile};
