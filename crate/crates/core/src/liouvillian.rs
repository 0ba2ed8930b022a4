//! Number-basis generator of the DPO master equation.
//!
//! In units of the signal decay rate the master equation reads
//!
//! ```text
//! dρ/dτ = (λ/2)[a†² − a², ρ]
//!       + (g²/2)(2a²ρa†² − a†²a²ρ − ρa†²a²)
//!       − i(χ′/2)[a†²a², ρ]
//!       + (N+1)(2aρa† − a†aρ − ρa†a) + N(2a†ρa − aa†ρ − ρaa†)
//!       − M(2aρa − a²ρ − ρa²) − M*(2a†ρa† − a†²ρ − ρa†²)
//! ```
//!
//! Projected onto `|n⟩⟨m|` every term touches at most one neighbour, so the
//! action is an 11-point stencil over `(n, m)`:
//!
//! ```text
//! offset          coefficient
//! (n,   m)        D_nm = e_n + e_m*,  e_n = −(g²+iχ′)q_n/2 − (N+1)n − N c_n
//! (n+1, m+1)      2(N+1) √((n+1)(m+1))
//! (n−1, m−1)      2N √(nm)
//! (n+2, m+2)      g² √((n+1)(n+2)(m+1)(m+2))
//! (n−2, m)        (λ/2 + M*) √(n(n−1))
//! (n,   m+2)      (−λ/2 + M*) √((m+1)(m+2))
//! (n+2, m)        (−λ/2 + M) √((n+1)(n+2))
//! (n,   m−2)      (λ/2 + M) √(m(m−1))
//! (n+1, m−1)      −2M √((n+1)m)
//! (n−1, m+1)      −2M* √(n(m+1))
//! ```
//!
//! with `q_n = n(n−1)` and `c_n = (aa†)_{nn}` of the truncated operators,
//! i.e. `n+1` below the cutoff and `0` at `n = N_c`. That last detail makes
//! the truncated generator exactly trace-preserving: `2a†ρa` cannot feed
//! population above `N_c`, so the matching loss term must vanish there too.
//!
//! The `a²ρ` and `ρa²` entries carry `+M` (and `+M*` for `a†²`): the
//! anomalous terms are a Lindblad dissipator, and with the opposite sign
//! the trace would leak at rate `4 Re(M⟨a²⟩)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;
use crate::reservoir::{BathMoments, SqueezeSchedule};

/// Below this dimension the stencil runs on the calling thread.
const PARALLEL_MIN_DIM: usize = 96;

/// Dimensionless DPO parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Pump strength `λ`.
    pub lambda: f64,
    /// Two-photon loss `g²`.
    pub g2: f64,
    /// Kerr strength `χ′`.
    pub chi_prime: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, g2: f64, chi_prime: f64) -> Result<Self> {
        let p = Self { lambda, g2, chi_prime };
        p.validate()?;
        Ok(p)
    }

    /// Parameters from the coupling `g` rather than `g²`.
    pub fn from_g(lambda: f64, g: f64, chi_prime: f64) -> Result<Self> {
        Self::new(lambda, g * g, chi_prime)
    }

    /// Pump needed for a steady-state amplitude `|α₀|`:
    /// `λ = |α₀|² g² √(1+χ²)`.
    pub fn from_alpha0_abs(alpha_abs: f64, g: f64, chi_prime: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::InvalidParameter(format!("g must be > 0, got {g}")));
        }
        let g2 = g * g;
        let chi = chi_prime / g2;
        Self::new(alpha_abs * alpha_abs * g2 * (1.0 + chi * chi).sqrt(), g2, chi_prime)
    }

    /// Checks the scenario invariants, including a finite cat amplitude.
    pub fn validate(&self) -> Result<()> {
        self.validate_couplings()?;
        if self.lambda > 0.0 && self.g2 == 0.0 && self.chi_prime == 0.0 {
            return Err(Error::InvalidParameter(
                "lambda > 0 needs g2 > 0 for a finite cat amplitude".into(),
            ));
        }
        Ok(())
    }

    /// Checks only what the generator itself needs: finite, nonnegative
    /// `λ` and `g²`.
    pub fn validate_couplings(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.g2.is_finite() && self.chi_prime.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite model parameters {self:?}")));
        }
        if self.lambda < 0.0 || self.g2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda and g2 must be ≥ 0, got λ = {}, g² = {}",
                self.lambda, self.g2
            )));
        }
        Ok(())
    }

    /// Normalized Kerr strength `χ = χ′/g²`.
    pub fn chi(&self) -> f64 {
        self.chi_prime / self.g2
    }

    /// Cat amplitude `α₀ = √(λ/(g² + iχ′))`.
    pub fn alpha0(&self) -> Complex64 {
        if self.lambda == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        (Complex64::new(self.lambda, 0.0) / Complex64::new(self.g2, self.chi_prime)).sqrt()
    }
}

/// The generator for a fixed model, bath schedule and cutoff.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    params: ModelParams,
    schedule: SqueezeSchedule,
    cutoff: usize,
    loss_scale: f64,
    /// `√k`, `k = 0..=N_c+2`.
    sqrt: Vec<f64>,
    /// `√((k+1)(k+2))`.
    pair: Vec<f64>,
    /// `k(k−1)`.
    q: Vec<f64>,
    /// Truncated `(aa†)_{kk}`.
    c: Vec<f64>,
}

impl Liouvillian {
    pub fn build(params: ModelParams, schedule: SqueezeSchedule, cutoff: usize) -> Result<Self> {
        params.validate_couplings()?;
        schedule.validate()?;
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall {
                cutoff,
                tail_mass: f64::NAN,
                limit: 0.0,
            });
        }
        let sqrt: Vec<f64> = (0..=cutoff + 2).map(|k| (k as f64).sqrt()).collect();
        let pair = (0..=cutoff).map(|k| sqrt[k + 1] * sqrt[k + 2]).collect();
        let q = (0..=cutoff).map(|k| (k * k.saturating_sub(1)) as f64).collect();
        let c = (0..=cutoff)
            .map(|k| if k < cutoff { (k + 1) as f64 } else { 0.0 })
            .collect();
        Ok(Self {
            params,
            schedule,
            cutoff,
            loss_scale: 1.0,
            sqrt,
            pair,
            q,
            c,
        })
    }

    /// Scale the single-photon reservoir coupling (the `N+1`, `N` and `M`
    /// terms). `0` switches the bath off entirely.
    pub fn with_loss_scale(mut self, scale: f64) -> Self {
        self.loss_scale = scale;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn schedule(&self) -> &SqueezeSchedule {
        &self.schedule
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// Bath moments in force at `tau` for state `rho`.
    pub fn moments_at(&self, tau: f64, rho: &[Complex64]) -> BathMoments {
        self.schedule.resolve_with(tau, || self.two_photon_moment(rho))
    }

    /// `dρ/dτ` at `tau`.
    pub fn apply(&self, rho: &FockDensityMatrix, tau: f64, out: &mut FockDensityMatrix) -> Result<()> {
        for found in [rho.cutoff(), out.cutoff()] {
            if found != self.cutoff {
                return Err(Error::DimensionMismatch {
                    expected: self.cutoff,
                    found,
                });
            }
        }
        self.apply_raw(rho.as_slice(), tau, out.as_mut_slice());
        Ok(())
    }

    /// Slice form of [`apply`](Self::apply); both buffers are row-major
    /// `(N_c+1)²`.
    pub fn apply_raw(&self, rho: &[Complex64], tau: f64, out: &mut [Complex64]) {
        let moments = self.moments_at(tau, rho);
        self.apply_with_moments(moments, rho, out);
    }

    /// The stencil for explicitly given bath moments.
    pub fn apply_with_moments(&self, moments: BathMoments, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim();
        assert_eq!(rho.len(), d * d, "rho buffer has wrong length");
        assert_eq!(out.len(), d * d, "output buffer has wrong length");
        let k = Coefficients::new(&self.params, moments, self.loss_scale);
        let e: Vec<Complex64> = (0..d)
            .map(|n| {
                Complex64::new(-0.5 * k.g2 * self.q[n], -0.5 * k.chi_prime * self.q[n])
                    - (k.n1 * n as f64 + k.n * self.c[n])
            })
            .collect();
        let row = |(n, out_row): (usize, &mut [Complex64])| self.row(&k, &e, rho, n, out_row);
        if d >= PARALLEL_MIN_DIM {
            out.par_chunks_mut(d).enumerate().for_each(row);
        } else {
            out.chunks_mut(d).enumerate().for_each(row);
        }
    }

    /// Row `n` of the output, accumulated one stencil offset at a time so
    /// each pass is a branch-free sweep over contiguous slices.
    #[inline]
    fn row(&self, k: &Coefficients, e: &[Complex64], rho: &[Complex64], n: usize, out: &mut [Complex64]) {
        let d = self.dim();
        let nc = self.cutoff;
        let s = &self.sqrt;
        let t = &self.pair;
        let r = |i: usize| &rho[i * d..(i + 1) * d];

        let en = e[n];
        for ((o, x), em) in out.iter_mut().zip(r(n)).zip(e) {
            *o = (en + em.conj()) * x;
        }
        // ρ_{n,m+2} and ρ_{n,m−2}.
        let here = r(n);
        let neg_lam_mc = -k.half_lambda + k.m.conj();
        let lam_m = k.half_lambda + k.m;
        for m in 0..d.saturating_sub(2) {
            out[m] += neg_lam_mc * t[m] * here[m + 2];
            out[m + 2] += lam_m * t[m] * here[m];
        }
        if n < nc {
            let up = r(n + 1);
            // ρ_{n+1,m+1}
            let c = k.two_n1 * s[n + 1];
            for m in 0..nc {
                out[m] += c * (s[m + 1] * up[m + 1]);
            }
            // ρ_{n+1,m−1}
            let c = -k.two_m * s[n + 1];
            for m in 1..d {
                out[m] += c * (s[m] * up[m - 1]);
            }
        }
        if n > 0 {
            let down = r(n - 1);
            // ρ_{n−1,m−1}
            let c = k.two_n * s[n];
            for m in 1..d {
                out[m] += c * (s[m] * down[m - 1]);
            }
            // ρ_{n−1,m+1}
            let c = -k.two_m.conj() * s[n];
            for m in 0..nc {
                out[m] += c * (s[m + 1] * down[m + 1]);
            }
        }
        if n + 2 <= nc {
            let up2 = r(n + 2);
            // ρ_{n+2,m+2}
            let c = k.g2 * t[n];
            for m in 0..d - 2 {
                out[m] += c * (t[m] * up2[m + 2]);
            }
            // ρ_{n+2,m}
            let c = (-k.half_lambda + k.m) * t[n];
            for (o, x) in out.iter_mut().zip(up2) {
                *o += c * x;
            }
        }
        if n >= 2 {
            // ρ_{n−2,m}
            let c = (k.half_lambda + k.m.conj()) * t[n - 2];
            for (o, x) in out.iter_mut().zip(r(n - 2)) {
                *o += c * x;
            }
        }
    }

    /// `Tr(ρ a²)` from a row-major buffer.
    pub fn two_photon_moment(&self, rho: &[Complex64]) -> Complex64 {
        let d = self.dim();
        (0..d.saturating_sub(2)).map(|k| self.pair[k] * rho[(k + 2) * d + k]).sum()
    }

    /// Largest stencil coefficient modulus over the schedule's envelope.
    pub fn max_coefficient(&self) -> f64 {
        let (n_bath, m_abs) = self.schedule.envelope();
        let ModelParams { lambda, g2, chi_prime } = self.params;
        let ls = self.loss_scale.abs();
        let nc = self.cutoff;
        let top = nc as f64;
        let q = self.q[nc];
        let diag = (g2 * q + ls * ((n_bath + 1.0) * top + n_bath * top) * 2.0)
            .hypot(chi_prime.abs() * q);
        let t_top = if nc >= 2 { self.pair[nc - 2] } else { 0.0 };
        [
            diag,
            2.0 * ls * (n_bath + 1.0) * top,
            g2 * t_top * t_top,
            (0.5 * lambda + ls * m_abs) * t_top,
            2.0 * ls * m_abs * top,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Operator-norm proxy
    /// `λN_c + g²N_c² + |χ′|N_c² + 2(N+1)N_c + 4|M|N_c`.
    pub fn norm_estimate(&self) -> f64 {
        let (n_bath, m_abs) = self.schedule.envelope();
        let ls = self.loss_scale.abs();
        let nc = self.cutoff as f64;
        let ModelParams { lambda, g2, chi_prime } = self.params;
        lambda * nc + (g2 + chi_prime.abs()) * nc * nc + ls * (2.0 * (n_bath + 1.0) * nc + 4.0 * m_abs * nc)
    }

    /// Default fixed step `min(1e-4, 0.1/‖L‖)`.
    pub fn default_dtau(&self) -> f64 {
        let norm = self.norm_estimate();
        if norm > 0.0 {
            (0.1 / norm).min(1e-4)
        } else {
            1e-4
        }
    }
}

/// Scalar prefactors shared by every stencil row.
struct Coefficients {
    g2: f64,
    chi_prime: f64,
    half_lambda: Complex64,
    n: f64,
    n1: f64,
    two_n: f64,
    two_n1: f64,
    m: Complex64,
    two_m: Complex64,
}

impl Coefficients {
    fn new(p: &ModelParams, b: BathMoments, loss_scale: f64) -> Self {
        let n = loss_scale * b.n;
        let n1 = loss_scale * (b.n + 1.0);
        let m = loss_scale * b.m;
        Self {
            g2: p.g2,
            chi_prime: p.chi_prime,
            half_lambda: Complex64::new(0.5 * p.lambda, 0.0),
            n,
            n1,
            two_n: 2.0 * n,
            two_n1: 2.0 * n1,
            m,
            two_m: 2.0 * m,
        }
    }
}
