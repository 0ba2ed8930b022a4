use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::wavefunction_table;
use super::AxisGrid;
use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;

/// Relative change tolerated when the position grid is refined.
pub const REFINEMENT_TOLERANCE: f64 = 5e-3;

/// `Σ_{n≠m} |ρ_{nm}|`.
pub fn coherence_l1_number_basis(rho: &FockDensityMatrix) -> f64 {
    let d = rho.dim();
    let mut total = 0.0;
    for n in 0..d {
        for (m, z) in rho.row(n).iter().enumerate() {
            if m != n {
                total += z.norm();
            }
        }
    }
    total
}

/// Continuous-variable l1 coherence in the `x_θ` basis,
/// `∫∫|⟨x|ρ|x′⟩| dx dx′ − ∫⟨x|ρ|x⟩ dx`, by the trapezoid rule on `axis`.
pub fn coherence_l1_continuous(rho: &FockDensityMatrix, axis: AxisGrid, theta: f64) -> Result<f64> {
    let rotated = rho.rotated(-theta);
    let d = rho.dim();
    let npts = axis.len();
    let psi = wavefunction_table(axis, rho.cutoff());
    // B[j][n] = Σ_m ρ_{nm} ψ_m(x_j), so ⟨x_i|ρ|x_j⟩ = Σ_n ψ_n(x_i) B[j][n].
    let data = rotated.as_slice();
    let b: Vec<Vec<Complex64>> = psi
        .par_iter()
        .map(|pj| {
            (0..d)
                .map(|n| {
                    let row = &data[n * d..(n + 1) * d];
                    row.iter().zip(pj).map(|(r, p)| r * p).sum()
                })
                .collect()
        })
        .collect();
    // The kernel is Hermitian in (x, x′): sum the upper triangle twice.
    // Rows are reduced in a fixed order so results do not depend on the
    // thread count.
    let rows: Vec<(f64, f64)> = (0..npts)
        .into_par_iter()
        .map(|i| {
            let pi = &psi[i];
            let wi = axis.weight(i);
            let mut total = 0.0;
            for j in i..npts {
                let bj = &b[j];
                let mut re = 0.0;
                let mut im = 0.0;
                for n in 0..d {
                    re += pi[n] * bj[n].re;
                    im += pi[n] * bj[n].im;
                }
                let v = re.hypot(im) * wi * axis.weight(j);
                total += if j == i { v } else { 2.0 * v };
            }
            let bi = &b[i];
            let on: f64 = (0..d).map(|n| pi[n] * bi[n].re).sum();
            (total, wi * on.abs())
        })
        .collect();
    let (double, diag) = rows.iter().fold((0.0, 0.0), |a, r| (a.0 + r.0, a.1 + r.1));
    let value = double - diag;
    if !value.is_finite() {
        return Err(Error::InvalidState("non-finite coherence integral".into()));
    }
    Ok(value)
}

/// [`coherence_l1_continuous`] on `axis` and on `axis` refined by 2;
/// returns the refined value, or an error when the two differ by more than
/// [`REFINEMENT_TOLERANCE`] relative.
pub fn coherence_l1_continuous_checked(rho: &FockDensityMatrix, axis: AxisGrid, theta: f64) -> Result<f64> {
    let coarse = coherence_l1_continuous(rho, axis, theta)?;
    let fine = coherence_l1_continuous(rho, axis.refined(), theta)?;
    let relative_shift = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if relative_shift > REFINEMENT_TOLERANCE {
        return Err(Error::GridTooCoarse { relative_shift });
    }
    Ok(fine)
}
