//! Scenario configuration files.
//!
//! A config is TOML with one table per concern; dotted keys at top level
//! (`model.lambda = 625.0`) and `[model]` sections are interchangeable.
//! `preset = "name"` starts from a built-in scenario and overlays the rest.

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use catsim_core::ReservoirModel;

use crate::error::{CliError, Result};
use crate::presets;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub name: Option<String>,
    pub preset: Option<String>,
    pub description: Option<String>,
    pub model: Option<ModelSection>,
    #[serde(default)]
    pub reservoir: ReservoirSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub signatures: SignatureSection,
    pub eta: Option<EtaSection>,
    #[serde(default)]
    pub sweep: SweepSection,
}

/// Exactly one of `lambda`, `lambda_over_g2`, `alpha0_abs` fixes the pump;
/// `g` or `g2` fixes the two-photon coupling; `chi_prime` or `chi` the Kerr
/// term (default 0).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lambda: Option<f64>,
    pub lambda_over_g2: Option<f64>,
    pub alpha0_abs: Option<f64>,
    pub g: Option<f64>,
    pub g2: Option<f64>,
    pub chi_prime: Option<f64>,
    pub chi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    StepOn,
    Rotating,
}

/// Squeezing strength comes from `ns` (photon number) or `r`; `phi` is the
/// preparation phase with `arg M = phi − π` (default: aligned with `α₀`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirSection {
    pub model: Option<ReservoirModel>,
    pub ns: Option<f64>,
    pub nth: Option<f64>,
    pub r: Option<f64>,
    pub phi: Option<f64>,
    pub schedule: Option<ScheduleKind>,
    pub tau_on: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Vacuum,
    Coherent,
    Cat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityName {
    Even,
    Odd,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub state: Option<InitialKind>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub parity: Option<ParityName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteppingKind {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub tau_end: Option<f64>,
    /// Number of uniform intervals between checkpoints.
    pub checkpoints: Option<usize>,
    pub checkpoint_taus: Option<Vec<f64>>,
    pub stepping: Option<SteppingKind>,
    pub dtau: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub renorm_threshold: Option<f64>,
    pub cutoff: Option<usize>,
    pub allow_large_cutoff: Option<bool>,
    pub save_final_state: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureSection {
    /// Basis angle for C_l1 and the first quadrature (default `arg α₀`).
    pub theta: Option<f64>,
    /// Quadrature angles relative to `theta` (default `[0, π/2]`).
    pub quadrature_offsets: Option<Vec<f64>>,
    pub quadrature_at: Option<Vec<f64>>,
    pub wigner_at: Option<Vec<f64>>,
    pub number_distribution_at: Option<Vec<f64>>,
    pub position_spacing: Option<f64>,
    pub position_extent: Option<f64>,
    pub wigner_spacing: Option<f64>,
    pub wigner_extent: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaSection {
    pub model: Option<ReservoirModel>,
    pub n_th: Option<f64>,
    pub r: Option<Vec<f64>>,
    /// Fringe quadrature angle; omitted means the optimal alignment.
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub gamma_t_end: Option<f64>,
    pub gamma_t_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub ns: Option<Vec<f64>>,
    pub nth: Option<Vec<f64>>,
    pub r: Option<Vec<f64>>,
    /// `τ` at which the summary reports C_l1 (default `tau_end`).
    pub c_l1_at: Option<f64>,
}

/// Parse config text, reporting TOML syntax and schema errors with their
/// line and key.
pub fn parse_table(text: &str, origin: &str) -> Result<Table> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::config(format!("{origin}: {}", e.to_string().trim_end())))?;
    // Schema check on the user's own text so diagnostics carry positions.
    toml::from_str::<Config>(text).map_err(|e| CliError::config(format!("{origin}: {}", e.to_string().trim_end())))?;
    Ok(table)
}

/// Apply `key.path=value` overrides; values are read as TOML, falling back
/// to a bare string.
pub fn apply_overrides(table: &mut Table, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (path, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("override `{item}` is not key=value")))?;
        let value = format!("v = {raw}")
            .parse::<Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.trim().to_string()));
        let keys: Vec<&str> = path.trim().split('.').collect();
        let (last, parents) = keys.split_last().expect("split yields at least one key");
        let mut cursor = &mut *table;
        for key in parents {
            let entry = cursor.entry(key.to_string()).or_insert_with(|| Value::Table(Table::new()));
            cursor = entry
                .as_table_mut()
                .ok_or_else(|| CliError::config(format!("override `{path}`: `{key}` is not a table")))?;
        }
        cursor.insert(last.to_string(), value);
    }
    Ok(())
}

/// Overlay `top` onto `base`, recursing into tables.
pub fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Resolve `preset` (if any) beneath `user` and deserialize the result.
pub fn resolve(user: Table) -> Result<Config> {
    let mut merged = match user.get("preset") {
        Some(Value::String(name)) => presets::table(name)?,
        Some(other) => return Err(CliError::config(format!("`preset` must be a string, got {other}"))),
        None => Table::new(),
    };
    merge(&mut merged, user);
    let config: Config = merged
        .try_into()
        .map_err(|e: toml::de::Error| CliError::config(e.to_string().trim_end().to_string()))?;
    Ok(config)
}

/// Read, override and resolve a config file.
pub fn load(text: &str, origin: &str, overrides: &[String]) -> Result<Config> {
    let mut table = parse_table(text, origin)?;
    apply_overrides(&mut table, overrides)?;
    resolve(table)
}
