use std::f64::consts::FRAC_2_PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AxisGrid;
use crate::fock::{FockDensityMatrix, Parity};
use crate::special::LaguerreFunctions;

/// Boundary magnitude above which a Wigner grid is considered truncated.
const BOUNDARY_WARN: f64 = 1e-8;

/// `W(α)` sampled on a square grid, `values[i * len + j]` at
/// `Re α = axis.point(i)`, `Im α = axis.point(j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub axis: AxisGrid,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis.len() + j]
    }

    /// 2D trapezoid integral of `f(W)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.axis.len();
        let mut total = 0.0;
        for i in 0..n {
            let wi = self.axis.weight(i);
            let row: f64 = (0..n).map(|j| self.axis.weight(j) * f(self.at(i, j))).sum();
            total += wi * row;
        }
        total
    }

    pub fn norm(&self) -> f64 {
        self.integrate(|w| w)
    }

    pub fn boundary_max(&self) -> f64 {
        let n = self.axis.len();
        (0..n)
            .flat_map(|k| [self.at(0, k), self.at(n - 1, k), self.at(k, 0), self.at(k, n - 1)])
            .fold(0.0, |m, w| m.max(w.abs()))
    }
}

/// Pointwise Wigner function of a fixed state.
///
/// With `x = 4|α|²` and `f_n^l` the normalized Laguerre functions,
/// `W(α) = (2/π)[S_0(x) + 2 Re Σ_{l≥1} e^{ilφ} S_l(x)]`,
/// `S_l(x) = Σ_n (−1)ⁿ ρ_{n,n+l} f_n^l(x)`, `φ = arg α`.
pub struct WignerEvaluator {
    cutoff: usize,
    /// `(−1)ⁿ ρ_{n,n+l}` for each `l`.
    bands: Vec<Vec<Complex64>>,
    laguerre: LaguerreFunctions,
}

impl WignerEvaluator {
    pub fn new(rho: &FockDensityMatrix) -> Self {
        let cutoff = rho.cutoff();
        let bands = (0..=cutoff)
            .map(|l| {
                (0..=cutoff - l)
                    .map(|n| if n % 2 == 0 { rho[(n, n + l)] } else { -rho[(n, n + l)] })
                    .collect()
            })
            .collect();
        Self {
            cutoff,
            bands,
            laguerre: LaguerreFunctions::new(cutoff),
        }
    }

    /// `S_l(4r²)` for every `l`.
    pub fn radial_sums(&self, r2: f64) -> Vec<Complex64> {
        let x = 4.0 * r2;
        let mut f = vec![0.0; self.cutoff + 1];
        self.bands
            .iter()
            .enumerate()
            .map(|(l, band)| {
                if l > 0 && x == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let f = &mut f[..band.len()];
                self.laguerre.fill(l, x, f);
                band.iter().zip(f.iter()).map(|(b, v)| b * v).sum()
            })
            .collect()
    }

    /// Combine radial sums at direction `e^{iφ}` (any value when `|α| = 0`).
    pub fn combine(sums: &[Complex64], phase: Complex64) -> f64 {
        let mut acc = 0.0;
        let mut z = Complex64::new(1.0, 0.0);
        for s in &sums[1..] {
            z *= phase;
            acc += (z * s).re;
        }
        FRAC_2_PI * (sums[0].re + 2.0 * acc)
    }

    pub fn eval(&self, alpha: Complex64) -> f64 {
        let r2 = alpha.norm_sqr();
        let phase = if r2 > 0.0 { alpha / r2.sqrt() } else { Complex64::new(1.0, 0.0) };
        Self::combine(&self.radial_sums(r2), phase)
    }
}

/// Wigner function of `rho` on the square grid `axis × axis`.
pub fn wigner(rho: &FockDensityMatrix, axis: AxisGrid) -> WignerGrid {
    let eval = WignerEvaluator::new(rho);
    let k = axis.half_count;
    let n = axis.len();
    let h = axis.spacing;
    // Points sharing |α| share the radial sums: walk one octant and fan out.
    let octant: Vec<Vec<(usize, f64)>> = (0..=k)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::with_capacity(8 * (i + 1));
            for j in 0..=i {
                let (a, b) = (i as f64 * h, j as f64 * h);
                let sums = eval.radial_sums(a * a + b * b);
                let r = a.hypot(b);
                let mut emit = |p: isize, q: isize| {
                    let (re, im) = (p as f64 * h, q as f64 * h);
                    let phase = if r > 0.0 { Complex64::new(re / r, im / r) } else { Complex64::new(1.0, 0.0) };
                    let (ii, jj) = ((p + k as isize) as usize, (q + k as isize) as usize);
                    out.push((ii * n + jj, WignerEvaluator::combine(&sums, phase)));
                };
                let (i, j) = (i as isize, j as isize);
                let mut seen: Vec<(isize, isize)> = Vec::with_capacity(8);
                for (p, q) in [(i, j), (j, i)] {
                    for (sp, sq) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        let pt = (sp * p, sq * q);
                        if !seen.contains(&pt) {
                            seen.push(pt);
                            emit(pt.0, pt.1);
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (idx, w) in octant.into_iter().flatten() {
        values[idx] = w;
    }
    let grid = WignerGrid { axis, values };
    let edge = grid.boundary_max();
    if edge > BOUNDARY_WARN {
        warn!("Wigner grid may be too small: boundary |W| = {edge:e}");
    }
    grid
}

/// Closed-form Wigner function of the pure even/odd cat `N(|α₀⟩ ± |−α₀⟩)`:
/// `(2/π)N²[e^{−2|α−α₀|²} + e^{−2|α+α₀|²} ± 2e^{−2|α|²}cos(4 Im(α*α₀))]`.
pub fn analytic_cat_wigner(alpha0: Complex64, parity: Parity, axis: AxisGrid) -> WignerGrid {
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let overlap = (-2.0 * alpha0.norm_sqr()).exp();
    let norm2 = 1.0 / (2.0 * (1.0 + sign * overlap));
    let n = axis.len();
    let values = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let re = axis.point(i);
            (0..n).map(move |j| {
                let a = Complex64::new(re, axis.point(j));
                let lobe_p = (-2.0 * (a - alpha0).norm_sqr()).exp();
                let lobe_m = (-2.0 * (a + alpha0).norm_sqr()).exp();
                let fringe = 2.0 * (-2.0 * a.norm_sqr()).exp() * (4.0 * (a.conj() * alpha0).im).cos();
                FRAC_2_PI * norm2 * (lobe_p + lobe_m + sign * fringe)
            })
        })
        .collect();
    WignerGrid { axis, values }
}

/// Negative volume `½∫(|W| − W) d²α`.
pub fn negativity(w: &WignerGrid) -> f64 {
    let edge = w.boundary_max();
    if edge > BOUNDARY_WARN {
        warn!("negativity on a truncated grid: boundary |W| = {edge:e}");
    }
    w.integrate(|v| (-v).max(0.0))
}
