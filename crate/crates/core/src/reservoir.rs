//! Reservoir characterization `(N, M)` for the squeezed-bath models.
//!
//! The bath seen by the signal mode has `⟨Γ†Γ⟩ ∝ N`, `⟨ΓΓ†⟩ ∝ N+1` and
//! `⟨ΓΓ⟩ ∝ M = |M|e^{iΦ}`. Three preparations are modelled:
//!
//! * squeezed vacuum from a zero-temperature parametric source,
//!   `|M| = √(N_s(N_s+1))`;
//! * a squeezed thermal state (thermal light passed through the squeezer),
//!   `N = N_th cosh 2r + sinh² r`, `M = ½(2N_th+1) sinh 2r e^{i(φ−π)}`;
//! * a thermalized squeezed state (squeezed vacuum later exposed to thermal
//!   noise), `N = N_th + sinh² r`, `M = ½ sinh 2r e^{i(φ−π)}`.
//!
//! Quadrature variances use the bath convention in which vacuum has unit
//! variance: `Δ²X_θ = 2N+1 + 2|M|cos(Φ−2θ)`, `Δ²P_θ = 2N+1 − 2|M|cos(Φ−2θ)`.
//! This is NOT the signal-mode convention used for `P(x_θ)` (vacuum ½).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Below this modulus of `⟨a²⟩` the rotating schedule falls back to its
/// fixed reference angle.
pub const ROTATING_FALLBACK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReservoirModel {
    VacuumSqueezed,
    SqueezedThermal,
    ThermalizedSqueezed,
}

impl ReservoirModel {
    pub fn name(self) -> &'static str {
        match self {
            ReservoirModel::VacuumSqueezed => "vacuum_squeezed",
            ReservoirModel::SqueezedThermal => "squeezed_thermal",
            ReservoirModel::ThermalizedSqueezed => "thermalized_squeezed",
        }
    }
}

impl fmt::Display for ReservoirModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ReservoirModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vacuum_squeezed" => Ok(ReservoirModel::VacuumSqueezed),
            "squeezed_thermal" => Ok(ReservoirModel::SqueezedThermal),
            "thermalized_squeezed" => Ok(ReservoirModel::ThermalizedSqueezed),
            other => Err(Error::InvalidParameter(format!("unknown reservoir model `{other}`"))),
        }
    }
}

/// The pair `(N, M)` entering the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMoments {
    pub n: f64,
    pub m: Complex64,
}

impl BathMoments {
    pub const VACUUM: BathMoments = BathMoments {
        n: 0.0,
        m: Complex64 { re: 0.0, im: 0.0 },
    };

    /// `|M| ≤ √(N(N+1))`, with a relative slack of 1e-12 for the boundary
    /// case of pure squeezed vacuum.
    pub fn is_physical(&self) -> bool {
        self.n >= 0.0
            && self.n.is_finite()
            && self.m.norm().is_finite()
            && self.m.norm() <= (self.n * (self.n + 1.0)).sqrt() * (1.0 + 1e-12) + 1e-300
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::UnphysicalReservoir(format!(
                "|M| = {} exceeds √(N(N+1)) = {} for N = {}",
                self.m.norm(),
                (self.n * (self.n + 1.0)).sqrt(),
                self.n
            )))
        }
    }
}

/// A bath state together with how it was prepared.
///
/// `n_s` is the photon number beyond the thermal part, so the master
/// equation always sees `N = n_th + n_s`. For the squeezed thermal model
/// that excess includes the thermal/squeezing cross term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirState {
    pub model: ReservoirModel,
    pub n_th: f64,
    pub n_s: f64,
    pub m: Complex64,
    /// Squeeze parameter `r` of the preparation.
    pub r: f64,
}

impl ReservoirState {
    /// Zero-temperature squeezed vacuum with `M = √(N_s(N_s+1)) e^{2iθ}`,
    /// squeezing the `P_θ` quadrature.
    pub fn vacuum_squeezed(n_s: f64, theta: f64) -> Result<Self> {
        check_nonneg("N_s", n_s)?;
        check_finite("theta", theta)?;
        Ok(Self {
            model: ReservoirModel::VacuumSqueezed,
            n_th: 0.0,
            n_s,
            m: Complex64::from_polar((n_s * (n_s + 1.0)).sqrt(), 2.0 * theta),
            r: n_s.sqrt().asinh(),
        })
    }

    pub fn squeezed_thermal(r: f64, n_th: f64, phi: f64) -> Result<Self> {
        check_nonneg("r", r)?;
        check_nonneg("N_th", n_th)?;
        check_finite("phi", phi)?;
        let sinh_r = r.sinh();
        let n_total = n_th * (2.0 * r).cosh() + sinh_r * sinh_r;
        Ok(Self {
            model: ReservoirModel::SqueezedThermal,
            n_th,
            n_s: n_total - n_th,
            m: Complex64::from_polar(0.5 * (2.0 * n_th + 1.0) * (2.0 * r).sinh(), phi - PI),
            r,
        })
    }

    pub fn thermalized_squeezed(r: f64, n_th: f64, phi: f64) -> Result<Self> {
        check_nonneg("r", r)?;
        check_nonneg("N_th", n_th)?;
        check_finite("phi", phi)?;
        let sinh_r = r.sinh();
        Ok(Self {
            model: ReservoirModel::ThermalizedSqueezed,
            n_th,
            n_s: sinh_r * sinh_r,
            m: Complex64::from_polar(0.5 * (2.0 * r).sinh(), phi - PI),
            r,
        })
    }

    /// Zero-temperature squeezed vacuum of photon number `n_s` exposed to a
    /// thermal environment: `N = N_th + N_s`, `M = √(N_s(N_s+1)) e^{2iθ}`.
    /// Same state as [`thermalized_squeezed`](Self::thermalized_squeezed)
    /// with `sinh² r = N_s`, `φ = 2θ + π`.
    pub fn thermalized_from_photons(n_s: f64, n_th: f64, theta: f64) -> Result<Self> {
        check_nonneg("N_s", n_s)?;
        let r = n_s.sqrt().asinh();
        let mut state = Self::thermalized_squeezed(r, n_th, 2.0 * theta + PI)?;
        // Keep the caller's N_s and |M| exactly rather than via sinh(asinh(·)).
        state.n_s = n_s;
        state.m = Complex64::from_polar((n_s * (n_s + 1.0)).sqrt(), 2.0 * theta);
        Ok(state)
    }

    /// Unsqueezed thermal bath.
    pub fn thermal(n_th: f64) -> Result<Self> {
        Self::thermalized_squeezed(0.0, n_th, PI)
    }

    pub fn vacuum() -> Self {
        Self::vacuum_squeezed(0.0, 0.0).expect("vacuum is valid")
    }

    /// Total bath photon number `N`.
    pub fn total_n(&self) -> f64 {
        self.n_th + self.n_s
    }

    /// Squeezing direction `Φ = arg M`.
    pub fn phase(&self) -> f64 {
        self.m.arg()
    }

    pub fn moments(&self) -> BathMoments {
        BathMoments {
            n: self.total_n(),
            m: self.m,
        }
    }

    /// The same bath with squeezing removed (thermal part only).
    pub fn unsqueezed(&self) -> BathMoments {
        BathMoments {
            n: self.n_th,
            m: Complex64::new(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.moments().validate()
    }

    /// `(Δ²X_θ, Δ²P_θ)` in units where vacuum has unit variance.
    pub fn quadrature_variances(&self, theta: f64) -> Result<(f64, f64)> {
        let base = 2.0 * self.total_n() + 1.0;
        let cross = 2.0 * self.m.norm() * (self.phase() - 2.0 * theta).cos();
        let (var_x, var_p) = (base + cross, base - cross);
        if var_x < 0.0 || var_p < 0.0 {
            return Err(Error::UnphysicalReservoir(format!(
                "negative quadrature variance ({var_x}, {var_p})"
            )));
        }
        Ok((var_x, var_p))
    }
}

/// How the squeezing is switched or steered during a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScheduleMode {
    Constant,
    /// Thermal-only bath before `tau_on`, full squeezed bath from `tau_on`.
    StepOn { tau_on: f64 },
    /// `|M|` fixed, direction `Φ(τ) = 2θ(τ)` with `θ = ½ arg⟨a²⟩`; uses
    /// `fallback_theta` while `|⟨a²⟩|` is below 1e-6.
    Rotating { fallback_theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSchedule {
    pub base: ReservoirState,
    pub mode: ScheduleMode,
}

impl SqueezeSchedule {
    pub fn constant(base: ReservoirState) -> Self {
        Self {
            base,
            mode: ScheduleMode::Constant,
        }
    }

    pub fn step_on(base: ReservoirState, tau_on: f64) -> Self {
        Self {
            base,
            mode: ScheduleMode::StepOn { tau_on },
        }
    }

    pub fn rotating(base: ReservoirState, fallback_theta: f64) -> Self {
        Self {
            base,
            mode: ScheduleMode::Rotating { fallback_theta },
        }
    }

    /// Moments in force at `tau`. Only the rotating mode reads `rho`.
    pub fn resolve(&self, tau: f64, rho: &FockDensityMatrix) -> BathMoments {
        self.resolve_with(tau, || rho.two_photon_moment())
    }

    /// As [`resolve`](Self::resolve), with `⟨a²⟩` supplied lazily.
    pub fn resolve_with(&self, tau: f64, two_photon: impl FnOnce() -> Complex64) -> BathMoments {
        match self.mode {
            ScheduleMode::Constant => self.base.moments(),
            ScheduleMode::StepOn { tau_on } => {
                if tau < tau_on {
                    self.base.unsqueezed()
                } else {
                    self.base.moments()
                }
            }
            ScheduleMode::Rotating { fallback_theta } => {
                let theta = angle_from_moment(two_photon(), fallback_theta);
                BathMoments {
                    n: self.base.total_n(),
                    m: Complex64::from_polar(self.base.m.norm(), 2.0 * theta),
                }
            }
        }
    }

    /// Times at which the generator changes discontinuously.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.mode {
            ScheduleMode::StepOn { tau_on } => vec![tau_on],
            _ => Vec::new(),
        }
    }

    /// Largest `(N, |M|)` the schedule can produce, for step-size bounds.
    pub fn envelope(&self) -> (f64, f64) {
        (self.base.total_n(), self.base.m.norm())
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if let ScheduleMode::StepOn { tau_on } = self.mode {
            check_nonneg("tau_on", tau_on)?;
        }
        Ok(())
    }
}

/// Squeezing angle matched to the two-photon coherence of `rho`.
pub fn rotating_angle(rho: &FockDensityMatrix, fallback: f64) -> f64 {
    angle_from_moment(rho.two_photon_moment(), fallback)
}

fn angle_from_moment(a2: Complex64, fallback: f64) -> f64 {
    if a2.norm() < ROTATING_FALLBACK_THRESHOLD {
        fallback
    } else {
        0.5 * a2.arg()
    }
}

/// Bose–Einstein occupancy `1/(e^{hf/kT} − 1)` for ordinary frequency `f`
/// in Hz and temperature in kelvin.
pub fn thermal_occupancy(freq_hz: f64, temp_k: f64) -> Result<f64> {
    if !(freq_hz > 0.0) || !(temp_k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thermal occupancy needs positive frequency and temperature, got f = {freq_hz}, T = {temp_k}"
        )));
    }
    Ok(1.0 / (PLANCK * freq_hz / (BOLTZMANN * temp_k)).exp_m1())
}

/// Temperature at which the mode at `freq_hz` has mean occupancy `n_th`.
pub fn temperature_for_occupancy(freq_hz: f64, n_th: f64) -> Result<f64> {
    if !(freq_hz > 0.0) || !(n_th > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need positive frequency and occupancy, got f = {freq_hz}, N = {n_th}"
        )));
    }
    Ok(PLANCK * freq_hz / (BOLTZMANN * (1.0 / n_th).ln_1p()))
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and ≥ 0, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vacuum_squeezed_examples() {
        let one = ReservoirState::vacuum_squeezed(1.0, 0.0).unwrap();
        assert!((one.m.re - 2f64.sqrt()).abs() < 1e-15 && one.m.im == 0.0);
        let two = ReservoirState::vacuum_squeezed(2.0, 0.0).unwrap();
        assert!((two.m.re - 6f64.sqrt()).abs() < 1e-15);
        let vac = ReservoirState::vacuum_squeezed(0.0, 0.0).unwrap();
        assert_eq!(vac.m, Complex64::new(0.0, 0.0));
        assert_eq!(vac.quadrature_variances(0.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn squeezing_percentages() {
        let (_, p1) = ReservoirState::vacuum_squeezed(1.0, 0.0)
            .unwrap()
            .quadrature_variances(0.0)
            .unwrap();
        assert!((p1 - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!(((1.0 - p1) * 100.0 - 82.84).abs() < 0.005);
        let (_, p2) = ReservoirState::vacuum_squeezed(2.0, 0.0)
            .unwrap()
            .quadrature_variances(0.0)
            .unwrap();
        assert!((p2 - (5.0 - 2.0 * 6f64.sqrt())).abs() < 1e-14);
        assert!(((1.0 - p2) * 100.0 - 89.90).abs() < 0.005);
    }

    #[test]
    fn large_squeezing_asymptotics() {
        let ns = 1e3;
        let (vx, vp) = ReservoirState::vacuum_squeezed(ns, 0.0)
            .unwrap()
            .quadrature_variances(0.0)
            .unwrap();
        assert!((vx / (4.0 * (ns + 0.5)) - 1.0).abs() < 1e-6);
        assert!((vp * 4.0 * ns - 1.0).abs() < 1e-3);
    }

    #[test]
    fn squeezed_thermal_examples() {
        let thermal = ReservoirState::squeezed_thermal(0.0, 5.0, PI).unwrap();
        assert_eq!(thermal.total_n(), 5.0);
        assert!(thermal.m.norm() < 1e-15);

        // (N_th + ½)e^{−2r} in half-vacuum units, i.e. (2N_th+1)e^{−2r} here.
        let st = ReservoirState::squeezed_thermal(1.0, 5.0, PI).unwrap();
        let (vx, vp) = st.quadrature_variances(0.0).unwrap();
        assert!((0.5 * vp - 5.5 * (-2.0f64).exp()).abs() < 1e-12);
        assert!((0.5 * vp - 0.7443).abs() < 1e-4);
        assert!((0.5 * vx - 5.5 * 2f64.exp()).abs() < 1e-12);

        let cold = ReservoirState::squeezed_thermal(1.0, 0.0, PI).unwrap();
        let n = 1f64.sinh().powi(2);
        assert!((cold.total_n() - n).abs() < 1e-15);
        assert!((cold.m.norm() - 0.5 * 2f64.sinh()).abs() < 1e-15);
        assert!((cold.m.norm() - (n * (n + 1.0)).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn thermalized_squeezed_examples() {
        let ts = ReservoirState::thermalized_squeezed(1.0, 0.5, PI).unwrap();
        let (_, vp) = ts.quadrature_variances(0.0).unwrap();
        assert!((vp - (1.0 + (-2.0f64).exp())).abs() < 1e-14);
        assert!((vp - 1.1353).abs() < 1e-4);

        let plain = ReservoirState::thermalized_squeezed(0.0, 0.5, PI).unwrap();
        assert_eq!(plain.total_n(), 0.5);
        assert!(plain.m.norm() < 1e-15);

        let heavy = ReservoirState::thermalized_squeezed(15.0, 0.5, PI).unwrap();
        let (_, vp) = heavy.quadrature_variances(0.0).unwrap();
        assert!((vp - 1.0).abs() < 1e-4, "floor 2N_th, got {vp}");
    }

    #[test]
    fn thermalized_from_photons_matches_r_form() {
        let a = ReservoirState::thermalized_from_photons(2.0, 0.5, 0.3).unwrap();
        let b = ReservoirState::thermalized_squeezed(2f64.sqrt().asinh(), 0.5, 0.6 + PI).unwrap();
        assert!((a.total_n() - b.total_n()).abs() < 1e-12);
        assert!((a.m - b.m).norm() < 1e-12);
    }

    #[test]
    fn occupancy_matches_room_and_cryogenic_values() {
        let f = 4.01e9;
        let n = thermal_occupancy(f, 293.0).unwrap();
        assert!((1450.0..=1600.0).contains(&n), "{n}");
        let t = temperature_for_occupancy(f, 0.02).unwrap();
        assert!((0.045..=0.055).contains(&t), "{t}");
        assert!((thermal_occupancy(f, t).unwrap() - 0.02).abs() < 1e-12);
        assert!(thermal_occupancy(f, 1e-3).unwrap() < 1e-80);
        assert!(thermal_occupancy(f, 0.0).is_err());
        assert!(thermal_occupancy(f, 1.0).unwrap() < thermal_occupancy(f, 2.0).unwrap());
        assert!(thermal_occupancy(2.0 * f, 1.0).unwrap() < thermal_occupancy(f, 1.0).unwrap());
    }

    #[test]
    fn step_on_schedule_switches_squeezing() {
        let base = ReservoirState::thermalized_from_photons(1.0, 0.2, 0.0).unwrap();
        let sched = SqueezeSchedule::step_on(base, 0.002);
        let rho = FockDensityMatrix::vacuum(4);
        let before = sched.resolve(0.001, &rho);
        assert_eq!(before.m, Complex64::new(0.0, 0.0));
        assert_eq!(before.n, 0.2);
        let after = sched.resolve(0.003, &rho);
        assert_eq!(after.m, base.m);
        assert_eq!(after.n, 1.2);
        assert_eq!(sched.breakpoints(), vec![0.002]);
    }

    #[test]
    fn rotating_schedule_tracks_two_photon_phase() {
        let base = ReservoirState::vacuum_squeezed(1.0, 0.0).unwrap();
        let sched = SqueezeSchedule::rotating(base, 0.25);
        let vac = FockDensityMatrix::vacuum(10);
        let m0 = sched.resolve(0.0, &vac).m;
        assert!((m0.arg() - 0.5).abs() < 1e-12, "fallback direction");
        let alpha = Complex64::from_polar(2.0, -0.4);
        let coh = FockDensityMatrix::coherent(alpha, 40).unwrap();
        let m = sched.resolve(0.0, &coh).m;
        assert!((m.norm() - 2f64.sqrt()).abs() < 1e-12);
        assert!((m.arg() - (-0.8)).abs() < 1e-9);
    }

    #[test]
    fn unphysical_moments_are_rejected() {
        let bad = BathMoments {
            n: 1.0,
            m: Complex64::new(1.5, 0.0),
        };
        assert!(matches!(bad.validate(), Err(Error::UnphysicalReservoir(_))));
        assert!(ReservoirState::vacuum_squeezed(-1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn uncertainty_and_physicality(r in 0.0f64..5.0, n_th in 0.0f64..10.0, phi in -PI..PI, theta in -PI..PI) {
            for state in [
                ReservoirState::squeezed_thermal(r, n_th, phi).unwrap(),
                ReservoirState::thermalized_squeezed(r, n_th, phi).unwrap(),
            ] {
                prop_assert!(state.moments().is_physical());
                let (vx, vp) = state.quadrature_variances(theta).unwrap();
                prop_assert!(vx * vp >= 1.0 - 1e-9 * vx.max(1.0), "{} {}", vx, vp);
            }
        }

        #[test]
        fn vacuum_squeezed_saturates_uncertainty(ns in 0.0f64..50.0, theta in -PI..PI) {
            let s = ReservoirState::vacuum_squeezed(ns, theta).unwrap();
            prop_assert!(s.moments().is_physical());
            let (vx, vp) = s.quadrature_variances(theta).unwrap();
            prop_assert!((vx * vp - 1.0).abs() < 1e-9 * (1.0 + vx));
        }

        #[test]
        fn models_coincide_at_zero_temperature(r in 0.0f64..5.0, phi in -PI..PI) {
            let a = ReservoirState::squeezed_thermal(r, 0.0, phi).unwrap();
            let b = ReservoirState::thermalized_squeezed(r, 0.0, phi).unwrap();
            prop_assert_eq!(a.total_n(), b.total_n());
            prop_assert_eq!(a.m, b.m);
        }

        #[test]
        fn squeezed_thermal_beats_thermalized(r in 0.01f64..5.0, n_th in 0.01f64..10.0) {
            let (_, st) = ReservoirState::squeezed_thermal(r, n_th, PI).unwrap().quadrature_variances(0.0).unwrap();
            let (_, ts) = ReservoirState::thermalized_squeezed(r, n_th, PI).unwrap().quadrature_variances(0.0).unwrap();
            prop_assert!(st < ts);
        }
    }
}
