//! Density matrices on a truncated number basis.
//!
//! A [`FockDensityMatrix`] with cutoff `N_c` stores the dense
//! `(N_c+1) × (N_c+1)` block `ρ_{n,m}`, `0 ≤ n, m ≤ N_c`, row-major. The
//! constructors build the reference states used throughout: vacuum,
//! coherent states, even/odd cats and the equal coherent mixture. Coherent
//! amplitudes are computed in log space so that `|α| = 20` (mean photon
//! number 400) is as cheap and accurate as `|α| = 1`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::log_factorial;

/// Largest Poisson tail tolerated beyond the cutoff when building a
/// coherent-state superposition.
pub const CONSTRUCTOR_TAIL_LIMIT: f64 = 1e-10;

/// Photon-number parity of a cat state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

/// Suggested cutoff for states around amplitude `α₀`:
/// `⌈|α₀|² + 6|α₀| + 10⌉`.
pub fn recommended_cutoff(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 6.0 * alpha_abs + 10.0).ceil() as usize
}

/// Number-state amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n = 0..=cutoff`.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let r = alpha.norm();
    let phase = alpha.arg();
    (0..=cutoff)
        .map(|n| {
            if r == 0.0 {
                return if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            }
            let ln_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * log_factorial(n);
            Complex64::from_polar(ln_mag.exp(), n as f64 * phase)
        })
        .collect()
}

/// Photon-number distribution with its odd-parity weight.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDistribution {
    pub probabilities: Vec<f64>,
    pub odd_weight: f64,
}

impl NumberDistribution {
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    cutoff: usize,
    data: Vec<Complex64>,
}

impl FockDensityMatrix {
    /// The all-zero matrix (not a state; used as a derivative buffer).
    pub fn zeros(cutoff: usize) -> Self {
        let dim = cutoff + 1;
        Self {
            cutoff,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Wraps row-major data of length `(cutoff+1)²`.
    pub fn from_row_major(cutoff: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = cutoff + 1;
        if data.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "expected {} entries for cutoff {cutoff}, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { cutoff, data })
    }

    /// `|ψ⟩⟨ψ|` for the given amplitudes; the cutoff is `ket.len() − 1`.
    pub fn from_ket(ket: &[Complex64]) -> Self {
        let dim = ket.len();
        assert!(dim > 0, "empty ket");
        let mut data = Vec::with_capacity(dim * dim);
        for a in ket {
            for b in ket {
                data.push(a * b.conj());
            }
        }
        Self {
            cutoff: dim - 1,
            data,
        }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::fock(0, cutoff).expect("n = 0 always fits")
    }

    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::CutoffTooSmall {
                cutoff,
                tail_mass: 1.0,
                limit: CONSTRUCTOR_TAIL_LIMIT,
            });
        }
        let mut rho = Self::zeros(cutoff);
        rho[(n, n)] = Complex64::new(1.0, 0.0);
        Ok(rho)
    }

    /// Pure coherent state `|α⟩⟨α|`.
    pub fn coherent(alpha: Complex64, cutoff: usize) -> Result<Self> {
        let ket = coherent_amplitudes(alpha, cutoff);
        let kept: f64 = ket.iter().map(|c| c.norm_sqr()).sum();
        check_tail(cutoff, 1.0 - kept)?;
        Ok(Self::from_ket(&ket))
    }

    /// Pure cat state `N_±(|α₀⟩ ± |−α₀⟩)` with
    /// `N_± = [2(1 ± e^{−2|α₀|²})]^{−1/2}`.
    pub fn cat(alpha0: Complex64, parity: Parity, cutoff: usize) -> Result<Self> {
        let ket = cat_amplitudes(alpha0, parity, cutoff)?;
        let kept: f64 = ket.iter().map(|c| c.norm_sqr()).sum();
        check_tail(cutoff, 1.0 - kept)?;
        Ok(Self::from_ket(&ket))
    }

    /// Equal classical mixture `½(|α₀⟩⟨α₀| + |−α₀⟩⟨−α₀|)`.
    pub fn coherent_mixture(alpha0: Complex64, cutoff: usize) -> Result<Self> {
        let plus = Self::coherent(alpha0, cutoff)?;
        let minus = Self::coherent(-alpha0, cutoff)?;
        let data = plus
            .data
            .iter()
            .zip(&minus.data)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        Ok(Self { cutoff, data })
    }

    /// Thermal state with mean occupancy `n_th`, renormalized on the
    /// truncated basis.
    pub fn thermal(n_th: f64, cutoff: usize) -> Result<Self> {
        if !(n_th >= 0.0) || !n_th.is_finite() {
            return Err(Error::InvalidParameter(format!("thermal occupancy {n_th}")));
        }
        let ratio = n_th / (n_th + 1.0);
        let tail = ratio.powi(cutoff as i32 + 1);
        check_tail(cutoff, tail)?;
        let mut rho = Self::zeros(cutoff);
        let mut p = 1.0 / (n_th + 1.0);
        for n in 0..=cutoff {
            rho[(n, n)] = Complex64::new(p, 0.0);
            p *= ratio;
        }
        let tr = rho.trace().re;
        rho.scale(1.0 / tr);
        Ok(rho)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, n: usize) -> &[Complex64] {
        let d = self.dim();
        &self.data[n * d..(n + 1) * d]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|n| self[(n, n)]).sum()
    }

    /// Population above `0.9 N_c`; a large value means the cutoff is too
    /// tight for the state.
    pub fn tail_mass(&self) -> f64 {
        let start = (0.9 * self.cutoff as f64).floor() as usize + 1;
        (start..self.dim()).map(|n| self[(n, n)].re).sum()
    }

    /// `Tr(ρ²) = Σ_{n,m} |ρ_{n,m}|²` (valid for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn number_distribution(&self) -> NumberDistribution {
        let probabilities: Vec<f64> = (0..self.dim()).map(|n| self[(n, n)].re).collect();
        let odd_weight = probabilities.iter().skip(1).step_by(2).sum();
        NumberDistribution {
            probabilities,
            odd_weight,
        }
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|n| n as f64 * self[(n, n)].re).sum()
    }

    /// Two-photon coherence `Tr(ρ a²) = ⟨a²⟩`.
    pub fn two_photon_moment(&self) -> Complex64 {
        (2..self.dim())
            .map(|n| ((n * (n - 1)) as f64).sqrt() * self[(n, n - 2)])
            .sum()
    }

    /// `Tr(ρ σ)` between two states on the same basis.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        self.check_same_cutoff(other)?;
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..d {
            for m in 0..d {
                acc += self[(n, m)] * other[(m, n)];
            }
        }
        Ok(acc)
    }

    /// Largest `|ρ_{n,m} − conj(ρ_{m,n})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for n in 0..d {
            for m in n..d {
                worst = worst.max((self[(n, m)] - self[(m, n)].conj()).norm());
            }
        }
        worst
    }

    /// `ρ ← (ρ + ρ†)/2`.
    pub fn hermitize(&mut self) {
        let d = self.dim();
        for n in 0..d {
            let diag = self[(n, n)].re;
            self[(n, n)] = Complex64::new(diag, 0.0);
            for m in n + 1..d {
                let avg = 0.5 * (self[(n, m)] + self[(m, n)].conj());
                self[(n, m)] = avg;
                self[(m, n)] = avg.conj();
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.data {
            *c *= factor;
        }
    }

    /// Phase-space rotation `e^{iφ a†a} ρ e^{−iφ a†a}`.
    pub fn rotated(&self, phi: f64) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        for n in 0..d {
            for m in 0..d {
                out[(n, m)] *= Complex64::from_polar(1.0, phi * (n as f64 - m as f64));
            }
        }
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_cutoff(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Checks the Hermiticity, trace and diagonal-positivity invariants.
    pub fn validate(&self) -> Result<()> {
        if self.data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = self.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = self.trace().re;
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        if let Some(n) = (0..self.dim()).find(|&n| self[(n, n)].re < -1e-12) {
            return Err(Error::InvalidState(format!(
                "negative population {} at n = {n}",
                self[(n, n)].re
            )));
        }
        Ok(())
    }

    pub(crate) fn check_same_cutoff(&self, other: &Self) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch {
                expected: self.cutoff,
                found: other.cutoff,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for FockDensityMatrix {
    type Output = Complex64;

    fn index(&self, (n, m): (usize, usize)) -> &Complex64 {
        &self.data[n * (self.cutoff + 1) + m]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FockDensityMatrix {
    fn index_mut(&mut self, (n, m): (usize, usize)) -> &mut Complex64 {
        &mut self.data[n * (self.cutoff + 1) + m]
    }
}

/// Amplitudes of `N_±(|α₀⟩ ± |−α₀⟩)`.
pub fn cat_amplitudes(alpha0: Complex64, parity: Parity, cutoff: usize) -> Result<Vec<Complex64>> {
    let overlap = (-2.0 * alpha0.norm_sqr()).exp();
    let denom = 2.0 * (1.0 + parity.sign() * overlap);
    if denom <= 1e-300 {
        return Err(Error::InvalidState(
            "odd cat with α₀ = 0 has no normalizable state".into(),
        ));
    }
    let norm = denom.powf(-0.5);
    let coh = coherent_amplitudes(alpha0, cutoff);
    Ok(coh
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            let flip = if n % 2 == 0 { 1.0 } else { -1.0 };
            c * norm * (1.0 + parity.sign() * flip)
        })
        .collect())
}

fn check_tail(cutoff: usize, tail_mass: f64) -> Result<()> {
    if tail_mass > CONSTRUCTOR_TAIL_LIMIT {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail_mass,
            limit: CONSTRUCTOR_TAIL_LIMIT,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let rho = FockDensityMatrix::coherent(c(0.0, 0.0), 10).unwrap();
        assert_eq!(rho, FockDensityMatrix::vacuum(10));
    }

    #[test]
    fn coherent_two_is_poisson_and_pure() {
        let rho = FockDensityMatrix::coherent(c(2.0, 0.0), 40).unwrap();
        let dist = rho.number_distribution();
        assert!((dist.probabilities[0] - (-4.0f64).exp()).abs() < 1e-15);
        for n in 0..=40 {
            let poisson = (-4.0 + n as f64 * 4f64.ln() - log_factorial(n)).exp();
            assert!((dist.probabilities[n] - poisson).abs() < 1e-14);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        rho.validate().unwrap();
    }

    #[test]
    fn coherent_overlap_matches_analytic() {
        let plus = coherent_amplitudes(c(3.0, 0.0), 60);
        let minus = coherent_amplitudes(c(-3.0, 0.0), 60);
        let ket_overlap: Complex64 = plus.iter().zip(&minus).map(|(a, b)| a.conj() * b).sum();
        let expected = (-18.0f64).exp();
        assert!((ket_overlap.norm() - expected).abs() / expected < 1e-6);

        let rp = FockDensityMatrix::coherent(c(3.0, 0.0), 60).unwrap();
        let rm = FockDensityMatrix::coherent(c(-3.0, 0.0), 60).unwrap();
        let tr = rp.overlap(&rm).unwrap();
        assert!((tr.norm() - (-36.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn cutoff_too_small_is_rejected() {
        assert!(matches!(
            FockDensityMatrix::coherent(c(5.0, 0.0), 10),
            Err(Error::CutoffTooSmall { cutoff: 10, .. })
        ));
        assert!(FockDensityMatrix::cat(c(5.0, 0.0), Parity::Even, 10).is_err());
        assert!(FockDensityMatrix::coherent_mixture(c(5.0, 0.0), 10).is_err());
    }

    #[test]
    fn even_cat_has_no_odd_population() {
        let rho = FockDensityMatrix::cat(c(2.0, 0.0), Parity::Even, 40).unwrap();
        let dist = rho.number_distribution();
        assert_eq!(dist.odd_weight, 0.0);
        for n in (1..=40).step_by(2) {
            assert_eq!(dist.probabilities[n], 0.0);
        }
        rho.validate().unwrap();
    }

    #[test]
    fn even_cat_normalization_matches_numeric() {
        let rho = FockDensityMatrix::cat(c(2.0, 0.0), Parity::Even, 40).unwrap();
        // Oracle: normalize the unnormalized superposition numerically.
        let plus = coherent_amplitudes(c(2.0, 0.0), 40);
        let minus = coherent_amplitudes(c(-2.0, 0.0), 40);
        let raw: Vec<Complex64> = plus.iter().zip(&minus).map(|(a, b)| a + b).collect();
        let norm_sq: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
        let analytic = 1.0 / (2.0 * (1.0 + (-8.0f64).exp()));
        assert!((1.0 / norm_sq - analytic).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cat_of_zero_is_vacuum_and_odd_zero_fails() {
        let rho = FockDensityMatrix::cat(c(0.0, 0.0), Parity::Even, 10).unwrap();
        assert!(rho.max_abs_diff(&FockDensityMatrix::vacuum(10)).unwrap() < 1e-15);
        assert!(FockDensityMatrix::cat(c(0.0, 0.0), Parity::Odd, 10).is_err());
    }

    #[test]
    fn odd_cat_has_no_even_population() {
        let rho = FockDensityMatrix::cat(c(1.5, 0.5), Parity::Odd, 30).unwrap();
        let dist = rho.number_distribution();
        assert!((dist.odd_weight - 1.0).abs() < 1e-10);
        rho.validate().unwrap();
    }

    #[test]
    fn even_cat_population_ratios() {
        let alpha: f64 = 3.0;
        let rho = FockDensityMatrix::cat(c(alpha, 0.0), Parity::Even, 60).unwrap();
        let p = rho.number_distribution().probabilities;
        let a4 = alpha.powi(4);
        let mut n = 0;
        while 2 * n + 2 <= 60 && p[2 * n] > 1e-12 {
            let ratio = p[2 * n + 2] / p[2 * n];
            let expected = a4 / (((2 * n + 1) * (2 * n + 2)) as f64);
            assert!((ratio / expected - 1.0).abs() < 1e-9, "n = {n}");
            n += 1;
        }
    }

    #[test]
    fn mixture_purity_and_limits() {
        let mix = FockDensityMatrix::coherent_mixture(c(3.0, 0.0), 60).unwrap();
        let expected = 0.5 * (1.0 + (-36.0f64).exp());
        assert!((mix.purity() - expected).abs() < 1e-10);
        mix.validate().unwrap();

        let vac = FockDensityMatrix::coherent_mixture(c(0.0, 0.0), 10).unwrap();
        assert!((vac.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purity_examples() {
        assert_eq!(FockDensityMatrix::vacuum(5).purity(), 1.0);
        let mut half = FockDensityMatrix::zeros(3);
        half[(0, 0)] = c(0.5, 0.0);
        half[(1, 1)] = c(0.5, 0.0);
        assert_eq!(half.purity(), 0.5);
    }

    #[test]
    fn thermal_distribution_is_geometric() {
        let rho = FockDensityMatrix::thermal(1.0, 60).unwrap();
        let p = rho.number_distribution().probabilities;
        for (n, pn) in p.iter().enumerate().take(20) {
            assert!((pn - 0.5f64.powi(n as i32 + 1)).abs() < 1e-15);
        }
        assert!(FockDensityMatrix::thermal(5.0, 10).is_err());
    }

    #[test]
    fn two_photon_moment_of_coherent_state() {
        let alpha = c(1.2, -0.7);
        let rho = FockDensityMatrix::coherent(alpha, 40).unwrap();
        assert!((rho.two_photon_moment() - alpha * alpha).norm() < 1e-10);
    }

    #[test]
    fn tail_mass_flags_tight_cutoff() {
        let rho = FockDensityMatrix::coherent(c(2.0, 0.0), 40).unwrap();
        assert!(rho.tail_mass() < 1e-8);
        let mut top = FockDensityMatrix::zeros(10);
        top[(10, 10)] = c(1.0, 0.0);
        assert_eq!(top.tail_mass(), 1.0);
    }

    proptest! {
        #[test]
        fn constructors_satisfy_invariants(re in -3.0f64..3.0, im in -3.0f64..3.0, odd in any::<bool>()) {
            let alpha = c(re, im);
            let cutoff = recommended_cutoff(alpha.norm());
            let parity = if odd { Parity::Odd } else { Parity::Even };
            FockDensityMatrix::coherent(alpha, cutoff).unwrap().validate().unwrap();
            FockDensityMatrix::coherent_mixture(alpha, cutoff).unwrap().validate().unwrap();
            if alpha.norm() > 0.05 || !odd {
                FockDensityMatrix::cat(alpha, parity, cutoff).unwrap().validate().unwrap();
            }
        }

        #[test]
        fn hermitize_preserves_purity(re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let rho = FockDensityMatrix::coherent_mixture(c(re, im), 45).unwrap();
            let mut h = rho.clone();
            h.hermitize();
            prop_assert!((h.purity() - rho.purity()).abs() < 1e-14);
        }
    }
}
