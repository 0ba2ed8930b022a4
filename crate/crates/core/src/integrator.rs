//! Time stepping for the master equation.
//!
//! Fixed-step RK4 is the default: every interval between consecutive
//! stops (checkpoints, schedule breakpoints, `tau_end`) is split into equal
//! steps no longer than the requested `dτ`, so stops are hit exactly and
//! the generator is never integrated across a discontinuity. An embedded
//! Dormand–Prince 5(4) mode is available for exploratory runs.
//!
//! At each checkpoint the state is re-Hermitized and, when the trace has
//! drifted by more than `renorm_threshold`, rescaled to unit trace. Every
//! such correction is logged and recorded.

use log::{debug, info};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;
use crate::liouvillian::Liouvillian;

/// Trace drift beyond which a run is aborted.
pub const TRACE_ABORT: f64 = 1e-6;

/// `dτ · max|coefficient|` must stay below this for fixed-step RK4.
pub const STABILITY_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stepping {
    /// Classic RK4; `None` uses [`Liouvillian::default_dtau`].
    Fixed { dtau: Option<f64> },
    /// Dormand–Prince 5(4) with mixed error control.
    Adaptive { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationPlan {
    pub tau_end: f64,
    /// Sorted stop times in `[0, tau_end]`; `tau_end` is always emitted.
    pub checkpoint_taus: Vec<f64>,
    pub stepping: Stepping,
    pub renorm_threshold: f64,
}

impl IntegrationPlan {
    pub fn fixed(tau_end: f64, checkpoint_taus: Vec<f64>, dtau: Option<f64>) -> Self {
        Self {
            tau_end,
            checkpoint_taus,
            stepping: Stepping::Fixed { dtau },
            renorm_threshold: 1e-10,
        }
    }

    pub fn adaptive(tau_end: f64, checkpoint_taus: Vec<f64>, rtol: f64, atol: f64) -> Self {
        Self {
            tau_end,
            checkpoint_taus,
            stepping: Stepping::Adaptive { rtol, atol },
            renorm_threshold: 1e-10,
        }
    }

    /// `count` evenly spaced checkpoints on `(0, tau_end]`, plus `τ = 0`.
    pub fn uniform_checkpoints(tau_end: f64, count: usize) -> Vec<f64> {
        let mut taus = vec![0.0];
        taus.extend((1..=count).map(|k| tau_end * k as f64 / count as f64));
        taus
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_end > 0.0 && self.tau_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau_end must be > 0, got {}", self.tau_end)));
        }
        for &t in &self.checkpoint_taus {
            if !(0.0..=self.tau_end).contains(&t) {
                return Err(Error::InvalidParameter(format!(
                    "checkpoint tau {t} outside [0, {}]",
                    self.tau_end
                )));
            }
        }
        if self.checkpoint_taus.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("checkpoint taus must be sorted".into()));
        }
        if !(self.renorm_threshold >= 0.0) {
            return Err(Error::InvalidParameter("renorm_threshold must be ≥ 0".into()));
        }
        match self.stepping {
            Stepping::Fixed { dtau: Some(h) } if !(h > 0.0 && h.is_finite()) => {
                Err(Error::InvalidParameter(format!("dtau must be > 0, got {h}")))
            }
            Stepping::Adaptive { rtol, atol } if !(rtol > 0.0 && atol > 0.0) => {
                Err(Error::InvalidParameter("adaptive tolerances must be > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Step used by the fixed-step mode for generator `l`.
    pub fn resolved_dtau(&self, l: &Liouvillian) -> f64 {
        match self.stepping {
            Stepping::Fixed { dtau: Some(h) } => h,
            _ => l.default_dtau(),
        }
    }
}

/// One scalar row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub tau: f64,
    pub purity: f64,
    pub negativity: f64,
    pub c_l1_cont: f64,
    pub c_l1_fock: f64,
    pub odd_parity: f64,
    pub mean_n: f64,
    /// `|Tr ρ − 1|` before renormalization.
    pub trace_err: f64,
    /// `arg Tr(ρa²)`.
    pub two_photon_phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceCorrection {
    pub tau: f64,
    pub drift: f64,
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub tau: f64,
    pub rho: FockDensityMatrix,
    /// `|Tr ρ − 1|` before any correction.
    pub trace_err: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvolveStats {
    pub steps: usize,
    pub rejected: usize,
    pub dtau: f64,
    pub corrections: Vec<TraceCorrection>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub checkpoints: Vec<Checkpoint>,
    pub stats: EvolveStats,
}

impl Trajectory {
    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("trajectory always holds tau_end")
    }
}

/// Evolve `rho0` under `l`, keeping the state at every checkpoint.
pub fn evolve(l: &Liouvillian, rho0: &FockDensityMatrix, plan: &IntegrationPlan) -> Result<Trajectory> {
    let mut checkpoints = Vec::new();
    let stats = evolve_with(l, rho0, plan, |cp| {
        checkpoints.push(cp.clone());
        Ok(())
    })?;
    Ok(Trajectory { checkpoints, stats })
}

/// Evolve `rho0`, handing each corrected checkpoint to `visit` instead of
/// storing it. An error from `visit` stops the run.
pub fn evolve_with<F>(l: &Liouvillian, rho0: &FockDensityMatrix, plan: &IntegrationPlan, mut visit: F) -> Result<EvolveStats>
where
    F: FnMut(&Checkpoint) -> Result<()>,
{
    plan.validate()?;
    if rho0.cutoff() != l.cutoff() {
        return Err(Error::DimensionMismatch {
            expected: l.cutoff(),
            found: rho0.cutoff(),
        });
    }
    let mut stops: Vec<(f64, bool)> = plan
        .checkpoint_taus
        .iter()
        .map(|&t| (t, true))
        .chain(std::iter::once((plan.tau_end, true)))
        .chain(
            l.schedule()
                .breakpoints()
                .into_iter()
                .filter(|&t| t > 0.0 && t < plan.tau_end)
                .map(|t| (t, false)),
        )
        .collect();
    stops.sort_by(|a, b| a.0.total_cmp(&b.0));
    stops.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 |= b.1;
            true
        } else {
            false
        }
    });

    let mut stepper = Stepper::new(l, plan)?;
    let mut stats = EvolveStats {
        dtau: stepper.dtau,
        ..EvolveStats::default()
    };
    let mut rho = rho0.clone();
    let mut tau = 0.0;
    for (stop, is_checkpoint) in stops {
        if stop > tau {
            stepper.advance(&mut rho, tau, stop, &mut stats)?;
            tau = stop;
        }
        if is_checkpoint {
            let cp = correct(&mut rho, tau, plan.renorm_threshold, &mut stats)?;
            visit(&cp)?;
        }
    }
    info!(
        "evolved to tau = {} in {} steps ({} rejected), {} trace corrections",
        plan.tau_end,
        stats.steps,
        stats.rejected,
        stats.corrections.len()
    );
    Ok(stats)
}

fn correct(rho: &mut FockDensityMatrix, tau: f64, threshold: f64, stats: &mut EvolveStats) -> Result<Checkpoint> {
    if rho.as_slice().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { tau });
    }
    rho.hermitize();
    let trace = rho.trace().re;
    let drift = (trace - 1.0).abs();
    if drift > TRACE_ABORT {
        return Err(Error::TraceBlowup { tau, drift });
    }
    if drift > threshold {
        info!("trace correction at tau = {tau}: drift {drift:e}");
        rho.scale(1.0 / trace);
        stats.corrections.push(TraceCorrection { tau, drift });
    }
    Ok(Checkpoint {
        tau,
        rho: rho.clone(),
        trace_err: drift,
    })
}

struct Stepper<'a> {
    l: &'a Liouvillian,
    mode: Stepping,
    dtau: f64,
    /// Carried-over adaptive step proposal.
    h_next: f64,
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    y_new: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    fn new(l: &'a Liouvillian, plan: &IntegrationPlan) -> Result<Self> {
        let dtau = plan.resolved_dtau(l);
        if let Stepping::Fixed { .. } = plan.stepping {
            let product = dtau * l.max_coefficient();
            if product >= STABILITY_LIMIT {
                return Err(Error::StabilityGuard { dtau, product });
            }
        }
        let n = l.dim() * l.dim();
        let zero = || vec![Complex64::new(0.0, 0.0); n];
        Ok(Self {
            l,
            mode: plan.stepping,
            dtau,
            h_next: dtau,
            k: std::array::from_fn(|_| zero()),
            tmp: zero(),
            y_new: zero(),
        })
    }

    fn advance(&mut self, rho: &mut FockDensityMatrix, t0: f64, t1: f64, stats: &mut EvolveStats) -> Result<()> {
        // Stops include every schedule breakpoint, so the bath is constant
        // on (t0, t1); resolving it at the midpoint keeps the final stage of
        // a step ending on a switch-on time from seeing the new bath.
        let schedule_tau = 0.5 * (t0 + t1);
        match self.mode {
            Stepping::Fixed { .. } => {
                let span = t1 - t0;
                let count = ((span / self.dtau) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                let h = span / count as f64;
                for _ in 0..count {
                    self.rk4(rho.as_mut_slice(), schedule_tau, h);
                    stats.steps += 1;
                }
                if rho.as_slice().iter().any(|z| !z.re.is_finite()) {
                    return Err(Error::NonFinite { tau: t1 });
                }
                Ok(())
            }
            Stepping::Adaptive { rtol, atol } => self.dopri(rho, t0, t1, schedule_tau, rtol, atol, stats),
        }
    }

    /// One RK4 step; `t` is the schedule time shared by all stages.
    fn rk4(&mut self, y: &mut [Complex64], t: f64, h: f64) {
        let [k1, k2, k3, k4, ..] = &mut self.k;
        let tmp = &mut self.tmp;
        self.l.apply_raw(y, t, k1);
        axpy_into(tmp, y, 0.5 * h, k1);
        self.l.apply_raw(tmp, t, k2);
        axpy_into(tmp, y, 0.5 * h, k2);
        self.l.apply_raw(tmp, t, k3);
        axpy_into(tmp, y, h, k3);
        self.l.apply_raw(tmp, t, k4);
        let w = h / 6.0;
        for i in 0..y.len() {
            y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }

    fn dopri(&mut self, rho: &mut FockDensityMatrix, t0: f64, t1: f64, schedule_tau: f64, rtol: f64, atol: f64, stats: &mut EvolveStats) -> Result<()> {
        const A: [&[f64]; 7] = [
            &[],
            &[1.0 / 5.0],
            &[3.0 / 40.0, 9.0 / 40.0],
            &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
            &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
            &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
            &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        // 5th-order weights minus embedded 4th-order weights.
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let mut t = t0;
        while t < t1 {
            let mut h = self.h_next.min(t1 - t);
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { tau: t, h });
            }
            let y = rho.as_mut_slice();
            for s in 0..7 {
                if s == 0 {
                    let (k0, _) = self.k.split_at_mut(1);
                    self.l.apply_raw(y, schedule_tau, &mut k0[0]);
                    continue;
                }
                for i in 0..y.len() {
                    let mut acc = y[i];
                    for (j, a) in A[s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += h * a * self.k[j][i];
                        }
                    }
                    self.tmp[i] = acc;
                }
                if s == 6 {
                    self.y_new.copy_from_slice(&self.tmp);
                }
                let (_, rest) = self.k.split_at_mut(s);
                self.l.apply_raw(&self.tmp, schedule_tau, &mut rest[0]);
            }
            let mut err: f64 = 0.0;
            for i in 0..y.len() {
                let mut e = Complex64::new(0.0, 0.0);
                for (s, w) in E.iter().enumerate() {
                    if *w != 0.0 {
                        e += w * self.k[s][i];
                    }
                }
                let scale = atol + rtol * y[i].norm().max(self.y_new[i].norm());
                err = err.max((h * e).norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::NonFinite { tau: t });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                y.copy_from_slice(&self.y_new);
                t = if h >= t1 - t { t1 } else { t + h };
                stats.steps += 1;
                // Do not let a short final step shrink the next proposal.
                if h < self.h_next {
                    h = self.h_next;
                }
                self.h_next = h * factor;
            } else {
                stats.rejected += 1;
                debug!("rejected step h = {h:e} at tau = {t} (err {err:.3})");
                self.h_next = h * factor;
            }
        }
        Ok(())
    }
}

fn axpy_into(out: &mut [Complex64], y: &[Complex64], a: f64, x: &[Complex64]) {
    for ((o, &yi), &xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + a * xi;
    }
}

/// Result of comparing a run against the same run at half the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Largest entrywise `|ρ_dτ − ρ_{dτ/2}|`.
    pub max_diff: f64,
    /// Richardson estimate of the finer run's error for a 4th-order method.
    pub fine_error_estimate: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compare final states at `dτ` and `dτ/2`; passes when their difference
/// is below `tolerance`.
pub fn convergence_check(coarse: &FockDensityMatrix, fine: &FockDensityMatrix, tolerance: f64) -> Result<ConvergenceReport> {
    let max_diff = coarse.max_abs_diff(fine)?;
    Ok(ConvergenceReport {
        max_diff,
        fine_error_estimate: max_diff / 15.0,
        tolerance,
        passed: max_diff < tolerance,
    })
}
