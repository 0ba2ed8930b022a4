//! Built-in scenarios.
//!
//! Each preset is a TOML fragment in the same schema as user configs, so a
//! config can name one and override any field.

use toml::Table;

use crate::error::{CliError, Result};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

const FIG1: &str = r#"
name = "fig1"
model.g = 2.5
model.lambda_over_g2 = 100.0
model.chi_prime = 0.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 1.0
reservoir.nth = 0.0
initial.state = "vacuum"
plan.tau_end = 0.02
plan.checkpoints = 40
signatures.quadrature_at = [0.0, 0.0025, 0.005, 0.0075, 0.01, 0.0125, 0.015, 0.0175, 0.02]
sweep.ns = [0.0, 1.0]
"#;

const FIG2: &str = r#"
name = "fig2"
model.g = 2.5
model.lambda_over_g2 = 100.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 1.0
reservoir.nth = 0.0
plan.tau_end = 0.015
plan.checkpoint_taus = [0.0075, 0.015]
signatures.number_distribution_at = [0.0075, 0.015]
sweep.ns = [0.0, 1.0]
"#;

const FIG3: &str = r#"
name = "fig3"
model.g = 2.5
model.lambda_over_g2 = 100.0
model.chi_prime = 0.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 1.0
reservoir.nth = 0.0
plan.tau_end = 0.02
plan.checkpoints = 40
sweep.ns = [0.0, 1.0, 2.0, 5.0]
"#;

const FIG4: &str = r#"
name = "fig4"
model.g = 2.5
model.lambda_over_g2 = 100.0
model.chi_prime = 0.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.0
plan.tau_end = 0.02
plan.checkpoints = 40
signatures.wigner_at = [0.02]
sweep.ns = [0.0, 1.0, 2.0, 5.0]
"#;

const FIG5: &str = r#"
name = "fig5"
model.g = 2.0
model.lambda_over_g2 = 400.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.0
plan.tau_end = 0.01
plan.checkpoints = 20
signatures.quadrature_at = [0.0, 0.0025, 0.005, 0.0075, 0.01]
sweep.ns = [0.0, 2.0]
"#;

const FIG5_DESK: &str = r#"
name = "fig5_desk"
model.g = 2.0
model.lambda_over_g2 = 100.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.0
plan.tau_end = 0.02
plan.checkpoints = 20
signatures.quadrature_at = [0.0, 0.005, 0.01, 0.015, 0.02]
sweep.ns = [0.0, 2.0]
"#;

const FIG6: &str = r#"
name = "fig6"
model.g = 2.0
model.lambda_over_g2 = 400.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.5
plan.tau_end = 0.01
plan.checkpoints = 20
signatures.quadrature_at = [0.0, 0.0025, 0.005, 0.0075, 0.01]
sweep.ns = [0.0, 2.0]
"#;

const FIG6_DESK: &str = r#"
name = "fig6_desk"
model.g = 2.0
model.lambda_over_g2 = 100.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.5
plan.tau_end = 0.02
plan.checkpoints = 20
signatures.quadrature_at = [0.0, 0.005, 0.01, 0.015, 0.02]
sweep.ns = [0.0, 2.0]
"#;

const FIG7: &str = r#"
name = "fig7"
model.g = 2.0
model.lambda_over_g2 = 400.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.5
plan.tau_end = 0.005
plan.checkpoint_taus = [0.005]
signatures.number_distribution_at = [0.005]
sweep.ns = [0.0, 2.0]
sweep.nth = [0.0, 0.5]
"#;

const FIG7_DESK: &str = r#"
name = "fig7_desk"
model.g = 2.0
model.lambda_over_g2 = 100.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.5
plan.tau_end = 0.005
plan.checkpoint_taus = [0.005]
signatures.number_distribution_at = [0.005]
sweep.ns = [0.0, 2.0]
sweep.nth = [0.0, 0.5]
"#;

const FIG8: &str = r#"
name = "fig8"
model.g = 2.5
model.lambda_over_g2 = 100.0
model.chi = 5.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.0
plan.tau_end = 0.02
plan.checkpoints = 40
signatures.quadrature_at = [0.0, 0.002, 0.005, 0.01, 0.02]
sweep.ns = [0.0, 1.0, 2.0, 5.0]
"#;

const FIG8_THERMAL: &str = r#"
name = "fig8_thermal"
model.g = 2.5
model.lambda_over_g2 = 100.0
model.chi = 5.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 1.0
plan.tau_end = 0.02
plan.checkpoints = 40
sweep.ns = [0.0, 1.0, 2.0, 5.0]
"#;

const FIG9: &str = r#"
name = "fig9"
model.g = 2.5
model.lambda_over_g2 = 100.0
model.chi = 5.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.0
reservoir.schedule = "step_on"
reservoir.tau_on = 0.002
plan.tau_end = 0.02
plan.checkpoints = 40
sweep.ns = [0.0, 1.0, 2.0, 5.0]
"#;

const FIG9_ROTATING: &str = r#"
name = "fig9_rotating"
model.g = 2.5
model.lambda_over_g2 = 100.0
model.chi = 5.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 2.0
reservoir.nth = 0.0
reservoir.schedule = "rotating"
plan.tau_end = 0.02
plan.checkpoints = 40
sweep.ns = [0.0, 1.0, 2.0, 5.0]
"#;

const LEGHTAS: &str = r#"
name = "leghtas"
model.alpha0_abs = 2.0
model.g = 1.41
model.chi_prime = 1.01
reservoir.model = "thermalized_squeezed"
reservoir.ns = 0.5
reservoir.nth = 0.02
reservoir.schedule = "step_on"
reservoir.tau_on = 0.1
plan.tau_end = 1.0
plan.checkpoints = 40
signatures.quadrature_at = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0]
signatures.wigner_at = [1.0]
sweep.ns = [0.0, 0.5, 1.0]
"#;

const LEGHTAS_IDEAL: &str = r#"
name = "leghtas_ideal"
model.alpha0_abs = 2.0
model.g = 1.41
model.chi_prime = 0.0
reservoir.model = "thermalized_squeezed"
reservoir.ns = 0.5
reservoir.nth = 0.0
reservoir.schedule = "step_on"
reservoir.tau_on = 0.1
plan.tau_end = 1.0
plan.checkpoints = 40
sweep.ns = [0.0, 0.5, 1.0]
"#;

const ETA_FIG11: &str = r#"
name = "eta_fig11"
eta.model = "thermalized_squeezed"
eta.n_th = 0.0
eta.r = [0.0, 0.5, 1.0, 2.0]
eta.gamma_t_end = 1.0
eta.gamma_t_points = 200
"#;

const ETA_FIG12: &str = r#"
name = "eta_fig12"
eta.model = "squeezed_thermal"
eta.n_th = 5.0
eta.r = [0.0, 0.5, 1.0, 2.0]
eta.gamma_t_end = 1.0
eta.gamma_t_points = 200
"#;

const ETA_FIG13: &str = r#"
name = "eta_fig13"
eta.model = "thermalized_squeezed"
eta.n_th = 5.0
eta.r = [0.0, 0.5, 1.0, 2.0]
eta.gamma_t_end = 1.0
eta.gamma_t_points = 200
"#;

pub const PRESETS: &[Preset] = &[
    Preset { name: "fig1", summary: "α₀=10 from vacuum, g=2.5, λ/g²=100, N_th=0, N_s=1; quadrature maps", toml: FIG1 },
    Preset { name: "fig2", summary: "as fig1; number distributions at τ=0.0075, 0.015", toml: FIG2 },
    Preset { name: "fig3", summary: "as fig1; C_l1 trajectories, sweep N_s ∈ {0,1,2,5}", toml: FIG3 },
    Preset { name: "fig4", summary: "as fig1 with N_s=2; negativity and purity, sweep N_s ∈ {0,1,2,5}", toml: FIG4 },
    Preset { name: "fig5", summary: "α₀=20 (g=2, λ/g²=400), N_s=2; needs plan.allow_large_cutoff", toml: FIG5 },
    Preset { name: "fig5_desk", summary: "fig5 reduced to α₀=10 (g=2, λ/g²=100)", toml: FIG5_DESK },
    Preset { name: "fig6", summary: "fig5 with N_th=0.5; needs plan.allow_large_cutoff", toml: FIG6 },
    Preset { name: "fig6_desk", summary: "fig6 reduced to α₀=10", toml: FIG6_DESK },
    Preset { name: "fig7", summary: "α₀=20 number distribution at τ=0.005, N_th=0.5; needs plan.allow_large_cutoff", toml: FIG7 },
    Preset { name: "fig7_desk", summary: "fig7 reduced to α₀=10", toml: FIG7_DESK },
    Preset { name: "fig8", summary: "Kerr χ=5, g=2.5, λ/g²=100, N_th=0, N_s=2; rotated axes", toml: FIG8 },
    Preset { name: "fig8_thermal", summary: "fig8 at N_th=1", toml: FIG8_THERMAL },
    Preset { name: "fig9", summary: "fig8 with squeezing switched on at τ=0.002", toml: FIG9 },
    Preset { name: "fig9_rotating", summary: "fig8 with squeezing direction tracking ⟨a²⟩", toml: FIG9_ROTATING },
    Preset { name: "leghtas", summary: "|α₀|=2, g=1.41, χ′=1.01, N_th=0.02, N_s=0.5 on at τ=0.1", toml: LEGHTAS },
    Preset { name: "leghtas_ideal", summary: "leghtas without Kerr term or thermal noise", toml: LEGHTAS_IDEAL },
    Preset { name: "eta_fig11", summary: "decoherence exponent, thermalized squeezed bath, N_th=0", toml: ETA_FIG11 },
    Preset { name: "eta_fig12", summary: "decoherence exponent, squeezed thermal bath, N_th=5", toml: ETA_FIG12 },
    Preset { name: "eta_fig13", summary: "decoherence exponent, thermalized squeezed bath, N_th=5", toml: ETA_FIG13 },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// The preset's table, with `preset` removed so it is not resolved twice.
pub fn table(name: &str) -> Result<Table> {
    let preset = find(name).ok_or_else(|| {
        let known: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        CliError::config(format!("unknown preset `{name}` (known: {})", known.join(", ")))
    })?;
    let table: Table = preset.toml.parse().expect("built-in presets are valid TOML");
    Ok(table)
}
