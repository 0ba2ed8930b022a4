//! Scenario runner for the catsim cat-state simulator: TOML configs and
//! built-in presets in, CSV artifacts and a hashed manifest out.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod scenario;
pub mod sweep;

pub use config::Config;
pub use error::{CliError, Result};
pub use scenario::Scenario;
