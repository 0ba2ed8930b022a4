//! Closed-form decoherence exponent of an initial cat under a Gaussian bath.
//!
//! The interference term of `P(x_θ)` decays as `|⟨α|−α⟩|^η = e^{−2|α|²η}`
//! with
//!
//! ```text
//! η(γt) = 1 − e^{−2γt} / (1 + 2[N + |M| cos(2θ + Φ)](1 − e^{−2γt}))
//! ```
//!
//! `η = 0` is full fringe visibility, `η = 1` none. Choosing
//! `cos(2θ + Φ) = −1` protects the fringes best; that is the default.
//!
//! For a thermalized squeezed bath at the optimal angle,
//! `N − |M| = N_th − ½(1 − e^{−2r})`, so infinite squeezing leaves
//! `η → 1 − e^{−2γt}/(1 + (2N_th − 1)(1 − e^{−2γt}))`, whose initial slope
//! is exactly `4N_th`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reservoir::ReservoirState;

/// Which fringe quadrature the exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "theta", rename_all = "snake_case")]
pub enum FringeAngle {
    /// `cos(2θ + Φ) = −1`.
    Optimal,
    /// Explicit quadrature angle `θ`.
    Theta(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaScenario {
    pub bath: ReservoirState,
    pub angle: FringeAngle,
    pub gamma_t: Vec<f64>,
}

impl EtaScenario {
    pub fn optimal(bath: ReservoirState, gamma_t: Vec<f64>) -> Self {
        Self {
            bath,
            angle: FringeAngle::Optimal,
            gamma_t,
        }
    }

    /// `cos(2θ + Φ)` for this scenario.
    pub fn alignment(&self) -> f64 {
        match self.angle {
            FringeAngle::Optimal => -1.0,
            FringeAngle::Theta(theta) => {
                if self.bath.m.norm() == 0.0 {
                    0.0
                } else {
                    (2.0 * theta + self.bath.phase()).cos()
                }
            }
        }
    }

    /// Effective noise `N + |M|cos(2θ + Φ)`.
    pub fn effective_noise(&self) -> f64 {
        self.bath.total_n() + self.bath.m.norm() * self.alignment()
    }
}

/// `η` at a single `γt`.
pub fn eta(s: &EtaScenario, gamma_t: f64) -> Result<f64> {
    if !(gamma_t >= 0.0) || !gamma_t.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma_t must be finite and ≥ 0, got {gamma_t}")));
    }
    let noise = s.effective_noise();
    // Rounding can put perfectly squeezed vacuum a hair below −½.
    if noise < -0.5 - 1e-9 * (1.0 + s.bath.total_n()) {
        return Err(Error::UnphysicalReservoir(format!(
            "N + |M|cos(2θ+Φ) = {noise} is below −1/2"
        )));
    }
    let noise = noise.max(-0.5);
    let decay = (-2.0 * gamma_t).exp();
    let loss = -(-2.0 * gamma_t).exp_m1();
    Ok(1.0 - decay / (1.0 + 2.0 * noise * loss))
}

/// `(γt, η)` over the scenario's grid.
pub fn eta_curve(s: &EtaScenario) -> Result<Vec<(f64, f64)>> {
    s.gamma_t.iter().map(|&gt| Ok((gt, eta(s, gt)?))).collect()
}

/// Fringe attenuation `e^{−2|α|²η}`.
pub fn fringe_attenuation(alpha_abs: f64, eta: f64) -> f64 {
    (-2.0 * alpha_abs * alpha_abs * eta).exp()
}

/// Header of the exponent table.
pub const ETA_CSV_HEADER: &str = "model,r,n_th,gamma_t,eta";

/// Append the curve of `s` as `model,r,n_th,gamma_t,eta` rows (no header).
pub fn write_eta_rows<W: Write>(s: &EtaScenario, mut w: W) -> Result<()> {
    for (gt, e) in eta_curve(s)? {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.bath.model, s.bath.r, s.bath.n_th, gt, e
        )?;
    }
    Ok(())
}
