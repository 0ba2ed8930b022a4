//! Orthogonal polynomials and combinatorial factors.
//!
//! Two families are needed: physicists' Hermite polynomials for the
//! number-state wavefunctions `⟨x|n⟩`, and associated Laguerre polynomials
//! for the number-basis Wigner kernel. The raw polynomials overflow long
//! before the cutoffs used here (`2ⁿn!` leaves double range near n = 150),
//! so every consumer inside the crate goes through the normalized,
//! log-scaled forms ([`hermite_functions`], [`LaguerreFunctions`]), which
//! stay O(1) for any order.

use crate::error::{Error, Result};

/// `ln(π)/4`, the log of the ground-state normalization `π^{1/4}`.
const QUARTER_LN_PI: f64 = 0.286_182_471_462_350_04;

/// Rescaling threshold for the scaled recurrences.
const BIG: f64 = 1e150;
const LN_BIG: f64 = 345.387_763_949_107_0;

/// Degree and (for Laguerre) associated index of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolynomialOrder {
    pub n: usize,
    pub l: usize,
}

impl PolynomialOrder {
    pub fn new(n: usize, l: usize) -> Self {
        Self { n, l }
    }

    /// True when the order fits inside a basis truncated at `cutoff`.
    pub fn fits(&self, cutoff: usize) -> bool {
        self.n + self.l <= cutoff
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{k+1} = 2x H_k − 2k H_{k−1}`.
///
/// Fails with [`Error::HermiteOverflow`] once the value leaves double range;
/// callers should then switch to [`hermite_function_log`].
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::HermiteOverflow { n, x })
    }
}

/// Log-magnitude and sign of the normalized oscillator eigenfunction
/// `ψ_n(x) = e^{−x²/2} H_n(x) / √(2ⁿ n! √π)`.
///
/// Returns `(ln|ψ_n(x)|, sign)`; a sign of `0.0` means the value is an exact
/// zero of the recurrence (ln is then `-∞`).
pub fn hermite_function_log(n: usize, x: f64) -> (f64, f64) {
    let mut log_scale = -QUARTER_LN_PI - 0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += LN_BIG;
        }
    }
    if cur == 0.0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (log_scale + cur.abs().ln(), cur.signum())
    }
}

/// Normalized eigenfunction `ψ_n(x)`. Underflows cleanly to zero far
/// outside the classically allowed region.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let (ln_abs, sign) = hermite_function_log(n, x);
    sign * ln_abs.exp()
}

/// Fills `out[k] = ψ_k(x)` for `k = 0..out.len()` with a single scaled
/// recurrence pass.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = -QUARTER_LN_PI - 0.5 * x * x;
    let mut scale = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = scale;
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += LN_BIG;
            scale = log_scale.exp();
        }
        out[k + 1] = cur * scale;
    }
}

/// Associated Laguerre polynomial `L_n^l(x)` by the recurrence
/// `(k+1) L_{k+1} = (2k+l+1−x) L_k − (k+l) L_{k−1}`.
pub fn assoc_laguerre(n: usize, l: usize, x: f64) -> f64 {
    let lf = l as f64;
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + lf + 1.0 - x) * cur - (kf + lf) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln(n!)`: exact integer product up to 20!, Stirling series beyond.
pub fn log_factorial(n: usize) -> f64 {
    if n <= 20 {
        let p: u64 = (1..=n as u64).product();
        return (p as f64).ln();
    }
    ln_gamma_large(n as f64 + 1.0)
}

/// Stirling series for `ln Γ(z)`, accurate to double precision for z > 20.
fn ln_gamma_large(z: f64) -> f64 {
    const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

/// Normalized associated Laguerre functions
///
/// ```text
/// f_n^l(x) = e^{−x/2} x^{l/2} √(n!/(n+l)!) L_n^l(x)
/// ```
///
/// for all `n + l ≤ max_order`. These are bounded by one in magnitude and
/// are exactly the combination that appears in the number-basis Wigner
/// kernel with `x = 4|α|²`. The recurrence coefficients are tabulated once
/// per cutoff.
#[derive(Debug, Clone)]
pub struct LaguerreFunctions {
    max_order: usize,
    /// `1/√((k+1)(k+l+1))`, row `l`, column `k`.
    inv_norm: Vec<Vec<f64>>,
    /// `√(k(k+l))`, row `l`, column `k`.
    back: Vec<Vec<f64>>,
    half_ln_fact: Vec<f64>,
}

impl LaguerreFunctions {
    pub fn new(max_order: usize) -> Self {
        let mut inv_norm = Vec::with_capacity(max_order + 1);
        let mut back = Vec::with_capacity(max_order + 1);
        for l in 0..=max_order {
            let len = max_order - l + 1;
            let lf = l as f64;
            inv_norm.push(
                (0..len)
                    .map(|k| 1.0 / ((k as f64 + 1.0) * (k as f64 + lf + 1.0)).sqrt())
                    .collect(),
            );
            back.push((0..len).map(|k| (k as f64 * (k as f64 + lf)).sqrt()).collect());
        }
        let half_ln_fact = (0..=max_order).map(|l| 0.5 * log_factorial(l)).collect();
        Self {
            max_order,
            inv_norm,
            back,
            half_ln_fact,
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Writes `f_n^l(x)` into `out[n]` for `n = 0..out.len()`.
    ///
    /// # Panics
    /// If `l + out.len() − 1` exceeds the tabulated order.
    pub fn fill(&self, l: usize, x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        assert!(
            l + out.len() - 1 <= self.max_order,
            "Laguerre order {} exceeds table size {}",
            l + out.len() - 1,
            self.max_order
        );
        let lf = l as f64;
        let mut log_scale = if l == 0 {
            -0.5 * x
        } else if x > 0.0 {
            -0.5 * x + 0.5 * lf * x.ln() - self.half_ln_fact[l]
        } else {
            out.fill(0.0);
            return;
        };
        let mut scale = log_scale.exp();
        let inv_norm = &self.inv_norm[l];
        let back = &self.back[l];
        let mut prev = 0.0;
        let mut cur = 1.0;
        out[0] = scale;
        for k in 0..out.len() - 1 {
            let next = ((2.0 * k as f64 + lf + 1.0 - x) * cur - back[k] * prev) * inv_norm[k];
            prev = cur;
            cur = next;
            if cur.abs() > BIG {
                cur /= BIG;
                prev /= BIG;
                log_scale += LN_BIG;
                scale = log_scale.exp();
            }
            out[k + 1] = cur * scale;
        }
    }
}
