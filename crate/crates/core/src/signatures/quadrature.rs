use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AxisGrid;
use crate::error::Result;
use crate::fock::FockDensityMatrix;
use crate::special::hermite_functions;

/// `P(x_θ)` sampled on a symmetric grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub theta: f64,
    pub axis: AxisGrid,
    pub density: Vec<f64>,
}

impl QuadratureGrid {
    pub fn points(&self) -> Vec<f64> {
        self.axis.points()
    }

    /// Trapezoid integral of the density.
    pub fn total(&self) -> f64 {
        self.density.iter().enumerate().map(|(i, p)| self.axis.weight(i) * p).sum()
    }
}

/// Harmonic-oscillator wavefunctions `ψ_n(x_i)`, one row per grid point.
pub(crate) fn wavefunction_table(axis: AxisGrid, cutoff: usize) -> Vec<Vec<f64>> {
    (0..axis.len())
        .into_par_iter()
        .map(|i| {
            let mut psi = vec![0.0; cutoff + 1];
            hermite_functions(axis.point(i), &mut psi);
            psi
        })
        .collect()
}

/// `P(x_θ) = Σ ρ_{nm} e^{−iθ(n−m)} ψ_n(x) ψ_m(x)`.
pub fn quadrature_distribution(rho: &FockDensityMatrix, theta: f64, axis: AxisGrid) -> Result<QuadratureGrid> {
    // In the rotated frame only the symmetric real part survives.
    let rotated = rho.rotated(-theta);
    let d = rho.dim();
    let re: Vec<f64> = rotated.as_slice().iter().map(|z| z.re).collect();
    let table = wavefunction_table(axis, rho.cutoff());
    let density = table
        .par_iter()
        .map(|psi| {
            let mut total = 0.0;
            for n in 0..d {
                let row = &re[n * d..(n + 1) * d];
                let mut inner = 0.5 * row[n] * psi[n];
                for m in n + 1..d {
                    inner += row[m] * psi[m];
                }
                total += 2.0 * psi[n] * inner;
            }
            total
        })
        .collect();
    Ok(QuadratureGrid { theta, axis, density })
}

/// Fringe contrast `(P_max − P_min)/(P_max + P_min)` between the largest
/// local maximum in `|x| ≤ 3π/(√2|α₀|)` and the local minimum nearest to
/// it. Returns 0 when the window holds fewer than two extrema.
pub fn fringe_visibility(q: &QuadratureGrid, alpha_abs: f64) -> f64 {
    let window = if alpha_abs > 0.0 { 3.0 * PI / (SQRT_2 * alpha_abs) } else { f64::INFINITY };
    let x = q.points();
    let p = &q.density;
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    let mut minima: Vec<(f64, f64)> = Vec::new();
    for i in 1..p.len().saturating_sub(1) {
        if x[i].abs() > window {
            continue;
        }
        if p[i] > p[i - 1] && p[i] >= p[i + 1] {
            maxima.push((x[i], p[i]));
        } else if p[i] < p[i - 1] && p[i] <= p[i + 1] {
            minima.push((x[i], p[i]));
        }
    }
    let Some(&(x_hi, hi)) = maxima.iter().max_by(|a, b| a.1.total_cmp(&b.1)) else {
        return 0.0;
    };
    let Some(&(_, lo)) = minima.iter().min_by(|a, b| (a.0 - x_hi).abs().total_cmp(&(b.0 - x_hi).abs())) else {
        return 0.0;
    };
    let lo = lo.max(0.0);
    (hi - lo) / (hi + lo)
}
