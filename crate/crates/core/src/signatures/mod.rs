//! Cat-state signatures computed from a density matrix.
//!
//! Two quadrature conventions coexist in this crate and are never mixed:
//! the signal-mode quadrature here is `x_θ = (ae^{−iθ} + a†e^{iθ})/√2`
//! (vacuum variance ½), while [`crate::reservoir`] reports bath variances
//! with vacuum normalized to 1. Phase-space coordinates are `α = x/√2 + ip/√2`
//! for the Wigner function, with `d²α = d(Re α) d(Im α)`.

mod coherence;
mod quadrature;
mod wigner;

pub use coherence::{coherence_l1_continuous, coherence_l1_continuous_checked, coherence_l1_number_basis};
pub use quadrature::{fringe_visibility, quadrature_distribution, QuadratureGrid};
pub use wigner::{analytic_cat_wigner, negativity, wigner, WignerEvaluator, WignerGrid};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::FockDensityMatrix;
use crate::integrator::TrajectoryRecord;

/// Symmetric uniform axis `{k·h : −K ≤ k ≤ K}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub half_count: usize,
    pub spacing: f64,
}

impl AxisGrid {
    /// Smallest symmetric grid with spacing `h` reaching at least `±extent`.
    pub fn covering(extent: f64, spacing: f64) -> Self {
        assert!(spacing > 0.0 && extent >= 0.0, "bad axis grid ({extent}, {spacing})");
        Self {
            half_count: (extent / spacing - 1e-9).ceil().max(0.0) as usize,
            spacing,
        }
    }

    pub fn len(&self) -> usize {
        2 * self.half_count + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extent(&self) -> f64 {
        self.half_count as f64 * self.spacing
    }

    pub fn point(&self, i: usize) -> f64 {
        (i as f64 - self.half_count as f64) * self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weight of point `i` (spacing included).
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.len() {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    /// Same extent at half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            half_count: 2 * self.half_count,
            spacing: 0.5 * self.spacing,
        }
    }

    /// Position grid for states of amplitude `|α₀|`: `±(√2|α₀| + 5)`, `h = 0.02`.
    pub fn position_default(alpha_abs: f64) -> Self {
        Self::covering(std::f64::consts::SQRT_2 * alpha_abs + 5.0, 0.02)
    }

    /// Phase-space grid for states of amplitude `|α₀|`: `±(|α₀| + 4)`,
    /// `h = min(0.05, 0.5/|α₀|)`.
    pub fn wigner_default(alpha_abs: f64) -> Self {
        let h = if alpha_abs > 0.0 { (0.5 / alpha_abs).min(0.05) } else { 0.05 };
        Self::covering(alpha_abs + 4.0, h)
    }
}

/// What to compute for each trajectory record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignatureOptions {
    /// Quadrature angle of the position basis used for `C_l1`.
    pub theta: f64,
    pub position_grid: AxisGrid,
    pub wigner_grid: AxisGrid,
}

impl SignatureOptions {
    pub fn for_amplitude(alpha_abs: f64, theta: f64) -> Self {
        Self {
            theta,
            position_grid: AxisGrid::position_default(alpha_abs),
            wigner_grid: AxisGrid::wigner_default(alpha_abs),
        }
    }
}

/// All scalar signatures of `rho` at `tau`.
pub fn scalar_record(tau: f64, rho: &FockDensityMatrix, trace_err: f64, opts: &SignatureOptions) -> Result<TrajectoryRecord> {
    let w = wigner(rho, opts.wigner_grid);
    let dist = rho.number_distribution();
    Ok(TrajectoryRecord {
        tau,
        purity: rho.purity(),
        negativity: negativity(&w),
        c_l1_cont: coherence_l1_continuous(rho, opts.position_grid, opts.theta)?,
        c_l1_fock: coherence_l1_number_basis(rho),
        odd_parity: dist.odd_weight,
        mean_n: dist.mean(),
        trace_err,
        two_photon_phase: rho.two_photon_moment().arg(),
    })
}
