//! Turn a parsed [`Config`] into concrete simulation inputs.

use std::f64::consts::{FRAC_PI_2, PI};

use catsim_core::fock::recommended_cutoff;
use catsim_core::{
    AxisGrid, EtaScenario, FockDensityMatrix, FringeAngle, IntegrationPlan, ModelParams, Parity, ReservoirModel,
    ReservoirState, SignatureOptions, SqueezeSchedule,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Config, InitialKind, ParityName, ScheduleKind, SteppingKind};
use crate::error::{CliError, Result};

/// Cutoffs above this need `plan.allow_large_cutoff = true`.
pub const LARGE_CUTOFF: usize = 300;

/// Relative tolerance for matching requested output times to checkpoints.
const TAU_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Vacuum,
    Coherent { alpha: Complex64 },
    Cat { alpha: Complex64, parity: Parity },
}

impl InitialState {
    fn amplitude(&self) -> f64 {
        match *self {
            InitialState::Vacuum => 0.0,
            InitialState::Coherent { alpha } | InitialState::Cat { alpha, .. } => alpha.norm(),
        }
    }

    pub fn build(&self, cutoff: usize) -> catsim_core::Result<FockDensityMatrix> {
        match *self {
            InitialState::Vacuum => Ok(FockDensityMatrix::vacuum(cutoff)),
            InitialState::Coherent { alpha } => FockDensityMatrix::coherent(alpha, cutoff),
            InitialState::Cat { alpha, parity } => FockDensityMatrix::cat(alpha, parity, cutoff),
        }
    }
}

/// Which gridded outputs to write, and at which checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Requests {
    pub options: SignatureOptions,
    pub quadrature_angles: Vec<f64>,
    pub quadrature_at: Vec<f64>,
    pub wigner_at: Vec<f64>,
    pub number_distribution_at: Vec<f64>,
}

impl Requests {
    fn wants(list: &[f64], tau: f64, tau_end: f64) -> bool {
        list.iter().any(|&t| (t - tau).abs() <= TAU_MATCH * tau_end)
    }

    pub fn quadrature(&self, tau: f64, tau_end: f64) -> bool {
        Self::wants(&self.quadrature_at, tau, tau_end)
    }

    pub fn wigner(&self, tau: f64, tau_end: f64) -> bool {
        Self::wants(&self.wigner_at, tau, tau_end)
    }

    pub fn number_distribution(&self, tau: f64, tau_end: f64) -> bool {
        Self::wants(&self.number_distribution_at, tau, tau_end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dynamics {
    pub params: ModelParams,
    pub alpha0: Complex64,
    pub schedule: SqueezeSchedule,
    pub initial: InitialState,
    pub cutoff: usize,
    pub plan: IntegrationPlan,
    pub requests: Requests,
    pub save_final_state: bool,
}

impl Dynamics {
    /// The output time in the plan closest to `tau`, if within tolerance.
    pub fn checkpoint_near(&self, tau: f64) -> Option<f64> {
        self.plan
            .checkpoint_taus
            .iter()
            .copied()
            .chain(std::iter::once(self.plan.tau_end))
            .find(|&t| (t - tau).abs() <= TAU_MATCH * self.plan.tau_end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub config: Config,
    pub dynamics: Option<Dynamics>,
    pub eta: Vec<EtaScenario>,
}

impl Scenario {
    pub fn from_config(config: &Config) -> Result<Self> {
        let name = config.name.clone().or_else(|| config.preset.clone()).unwrap_or_else(|| "scenario".into());
        let dynamics = config.model.as_ref().map(|_| dynamics(config)).transpose()?;
        let eta = eta_scenarios(config)?;
        if dynamics.is_none() && eta.is_empty() {
            return Err(CliError::config("nothing to run: give a [model] section, an [eta] section, or both"));
        }
        if dynamics.is_none() && has_dynamics_keys(config) {
            return Err(CliError::config("reservoir/initial/plan/signatures settings need a [model] section"));
        }
        Ok(Self {
            name,
            config: config.clone(),
            dynamics,
            eta,
        })
    }
}

fn has_dynamics_keys(c: &Config) -> bool {
    c.reservoir != Default::default()
        || c.initial != Default::default()
        || c.plan != Default::default()
        || c.signatures != Default::default()
}

fn invalid(context: &str) -> impl Fn(catsim_core::Error) -> CliError + '_ {
    move |e| CliError::config(format!("{context}: {e}"))
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!("{key} must be a positive number, got {v}")))
    }
}

fn model_params(config: &Config) -> Result<ModelParams> {
    let m = config.model.as_ref().expect("caller checked");
    let g2 = match (m.g, m.g2) {
        (Some(g), None) => positive("model.g", g)?.powi(2),
        (None, Some(g2)) => positive("model.g2", g2)?,
        (Some(_), Some(_)) => return Err(CliError::config("give only one of model.g, model.g2")),
        (None, None) => return Err(CliError::config("model needs model.g or model.g2")),
    };
    let chi_prime = match (m.chi_prime, m.chi) {
        (Some(c), None) => c,
        (None, Some(chi)) => chi * g2,
        (None, None) => 0.0,
        (Some(_), Some(_)) => return Err(CliError::config("give only one of model.chi_prime, model.chi")),
    };
    let params = match (m.lambda, m.lambda_over_g2, m.alpha0_abs) {
        (Some(lambda), None, None) => ModelParams::new(lambda, g2, chi_prime),
        (None, Some(ratio), None) => ModelParams::new(ratio * g2, g2, chi_prime),
        (None, None, Some(a)) => ModelParams::from_alpha0_abs(a, g2.sqrt(), chi_prime),
        _ => {
            return Err(CliError::config(
                "give exactly one of model.lambda, model.lambda_over_g2, model.alpha0_abs",
            ))
        }
    };
    params.map_err(invalid("model"))
}

/// Bath from the reservoir section; `theta` is the default squeezing axis.
fn reservoir(config: &Config, theta: f64) -> Result<ReservoirState> {
    let r = &config.reservoir;
    let model = r.model.unwrap_or(ReservoirModel::ThermalizedSqueezed);
    let nth = r.nth.unwrap_or(0.0);
    let phi = r.phi.unwrap_or(2.0 * theta + PI);
    let bath = match (r.ns, r.r) {
        (Some(_), Some(_)) => return Err(CliError::config("give only one of reservoir.ns, reservoir.r")),
        (ns, sq) => {
            let ns = ns.unwrap_or_else(|| sq.map_or(0.0, |x| x.sinh().powi(2)));
            let r_param = sq.unwrap_or_else(|| ns.max(0.0).sqrt().asinh());
            match model {
                ReservoirModel::VacuumSqueezed => {
                    if nth != 0.0 {
                        return Err(CliError::config("vacuum_squeezed reservoir has no thermal part; drop reservoir.nth"));
                    }
                    ReservoirState::vacuum_squeezed(ns, (phi - PI) / 2.0)
                }
                ReservoirModel::ThermalizedSqueezed if sq.is_none() => {
                    ReservoirState::thermalized_from_photons(ns, nth, (phi - PI) / 2.0)
                }
                ReservoirModel::ThermalizedSqueezed => ReservoirState::thermalized_squeezed(r_param, nth, phi),
                ReservoirModel::SqueezedThermal => ReservoirState::squeezed_thermal(r_param, nth, phi),
            }
        }
    }
    .map_err(invalid("reservoir"))?;
    bath.validate().map_err(invalid("reservoir"))?;
    Ok(bath)
}

fn schedule(config: &Config, bath: ReservoirState, theta: f64) -> Result<SqueezeSchedule> {
    let r = &config.reservoir;
    let s = match (r.schedule.unwrap_or(ScheduleKind::Constant), r.tau_on) {
        (ScheduleKind::StepOn, Some(t)) => SqueezeSchedule::step_on(bath, t),
        (ScheduleKind::StepOn, None) => return Err(CliError::config("reservoir.schedule = \"step_on\" needs reservoir.tau_on")),
        (_, Some(_)) => return Err(CliError::config("reservoir.tau_on is only used with schedule = \"step_on\"")),
        (ScheduleKind::Constant, None) => SqueezeSchedule::constant(bath),
        (ScheduleKind::Rotating, None) => SqueezeSchedule::rotating(bath, theta),
    };
    s.validate().map_err(invalid("reservoir"))?;
    Ok(s)
}

fn initial(config: &Config, alpha0: Complex64) -> Result<InitialState> {
    let i = &config.initial;
    let alpha = match (i.alpha_re, i.alpha_im) {
        (None, None) => None,
        (re, im) => Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
    };
    match i.state.unwrap_or(InitialKind::Vacuum) {
        InitialKind::Vacuum if alpha.is_some() || i.parity.is_some() => {
            Err(CliError::config("initial.alpha_*/parity need initial.state = \"coherent\" or \"cat\""))
        }
        InitialKind::Vacuum => Ok(InitialState::Vacuum),
        InitialKind::Coherent if i.parity.is_some() => Err(CliError::config("initial.parity applies only to cat states")),
        InitialKind::Coherent => Ok(InitialState::Coherent {
            alpha: alpha.unwrap_or(alpha0),
        }),
        InitialKind::Cat => Ok(InitialState::Cat {
            alpha: alpha.unwrap_or(alpha0),
            parity: match i.parity.unwrap_or(ParityName::Even) {
                ParityName::Even => Parity::Even,
                ParityName::Odd => Parity::Odd,
            },
        }),
    }
}

fn check_taus(key: &str, taus: &[f64], tau_end: f64) -> Result<()> {
    match taus.iter().find(|&&t| !(t >= 0.0 && t <= tau_end * (1.0 + TAU_MATCH))) {
        Some(t) => Err(CliError::config(format!("{key}: τ = {t} outside [0, {tau_end}]"))),
        None => Ok(()),
    }
}

fn dynamics(config: &Config) -> Result<Dynamics> {
    let params = model_params(config)?;
    let alpha0 = params.alpha0();
    let sig = &config.signatures;
    let theta = sig.theta.unwrap_or(alpha0.arg());
    let bath = reservoir(config, alpha0.arg())?;
    let schedule = schedule(config, bath, alpha0.arg())?;
    let initial = initial(config, alpha0)?;

    let p = &config.plan;
    let amplitude = alpha0.norm().max(initial.amplitude());
    let cutoff = p.cutoff.unwrap_or_else(|| recommended_cutoff(amplitude));
    if cutoff < 2 {
        return Err(CliError::config(format!("plan.cutoff must be ≥ 2, got {cutoff}")));
    }
    if cutoff > LARGE_CUTOFF && !p.allow_large_cutoff.unwrap_or(false) {
        return Err(CliError::config(format!(
            "cutoff N_c = {cutoff} exceeds {LARGE_CUTOFF}; this run is slow and memory-heavy \
             (set plan.allow_large_cutoff = true to proceed, or use a reduced-amplitude preset)"
        )));
    }

    let tau_end = positive("plan.tau_end", p.tau_end.ok_or_else(|| CliError::config("plan.tau_end is required"))?)?;
    let requests = Requests {
        options: SignatureOptions {
            theta,
            position_grid: grid(sig.position_extent, sig.position_spacing, AxisGrid::position_default(amplitude))?,
            wigner_grid: grid(sig.wigner_extent, sig.wigner_spacing, AxisGrid::wigner_default(amplitude))?,
        },
        quadrature_angles: sig
            .quadrature_offsets
            .clone()
            .unwrap_or_else(|| vec![0.0, FRAC_PI_2])
            .into_iter()
            .map(|d| theta + d)
            .collect(),
        quadrature_at: sig.quadrature_at.clone().unwrap_or_default(),
        wigner_at: sig.wigner_at.clone().unwrap_or_default(),
        number_distribution_at: sig.number_distribution_at.clone().unwrap_or_default(),
    };
    check_taus("signatures.quadrature_at", &requests.quadrature_at, tau_end)?;
    check_taus("signatures.wigner_at", &requests.wigner_at, tau_end)?;
    check_taus("signatures.number_distribution_at", &requests.number_distribution_at, tau_end)?;
    let explicit = p.checkpoint_taus.clone().unwrap_or_default();
    check_taus("plan.checkpoint_taus", &explicit, tau_end)?;

    let uniform = match (p.checkpoints, &p.checkpoint_taus) {
        (Some(0), _) => return Err(CliError::config("plan.checkpoints must be ≥ 1")),
        (Some(n), _) => IntegrationPlan::uniform_checkpoints(tau_end, n),
        (None, None) => IntegrationPlan::uniform_checkpoints(tau_end, 20),
        (None, Some(_)) => vec![],
    };
    let mut taus: Vec<f64> = uniform
        .into_iter()
        .chain(explicit)
        .chain(requests.quadrature_at.iter().copied())
        .chain(requests.wigner_at.iter().copied())
        .chain(requests.number_distribution_at.iter().copied())
        .map(|t| t.min(tau_end))
        .collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup_by(|b, a| (*b - *a).abs() <= TAU_MATCH * tau_end);
    // The integrator always emits tau_end itself.
    if taus.last().is_some_and(|&t| (t - tau_end).abs() <= TAU_MATCH * tau_end) {
        taus.pop();
    }

    let mut plan = match p.stepping.unwrap_or(SteppingKind::Fixed) {
        SteppingKind::Fixed => {
            if p.rtol.is_some() || p.atol.is_some() {
                return Err(CliError::config("plan.rtol/atol need plan.stepping = \"adaptive\""));
            }
            IntegrationPlan::fixed(tau_end, taus, p.dtau)
        }
        SteppingKind::Adaptive => {
            if p.dtau.is_some() {
                return Err(CliError::config("plan.dtau applies only to fixed stepping"));
            }
            IntegrationPlan::adaptive(tau_end, taus, p.rtol.unwrap_or(1e-8), p.atol.unwrap_or(1e-10))
        }
    };
    if let Some(t) = p.renorm_threshold {
        plan.renorm_threshold = t;
    }
    plan.validate().map_err(invalid("plan"))?;

    Ok(Dynamics {
        params,
        alpha0,
        schedule,
        initial,
        cutoff,
        plan,
        requests,
        save_final_state: p.save_final_state.unwrap_or(false),
    })
}

fn grid(extent: Option<f64>, spacing: Option<f64>, default: AxisGrid) -> Result<AxisGrid> {
    let extent = positive("grid extent", extent.unwrap_or(default.extent()))?;
    let spacing = positive("grid spacing", spacing.unwrap_or(default.spacing))?;
    Ok(AxisGrid::covering(extent, spacing))
}

fn eta_scenarios(config: &Config) -> Result<Vec<EtaScenario>> {
    let Some(e) = &config.eta else {
        return Ok(vec![]);
    };
    let model = e.model.unwrap_or(ReservoirModel::ThermalizedSqueezed);
    let n_th = e.n_th.unwrap_or(0.0);
    let phi = e.phi.unwrap_or(PI);
    let end = positive("eta.gamma_t_end", e.gamma_t_end.unwrap_or(1.0))?;
    let points = e.gamma_t_points.unwrap_or(100);
    if points == 0 {
        return Err(CliError::config("eta.gamma_t_points must be ≥ 1"));
    }
    let gamma_t: Vec<f64> = (0..=points).map(|k| end * k as f64 / points as f64).collect();
    let angle = e.theta.map_or(FringeAngle::Optimal, FringeAngle::Theta);
    e.r.clone()
        .unwrap_or_else(|| vec![0.0])
        .into_iter()
        .map(|r| {
            let bath = match model {
                ReservoirModel::SqueezedThermal => ReservoirState::squeezed_thermal(r, n_th, phi),
                ReservoirModel::ThermalizedSqueezed => ReservoirState::thermalized_squeezed(r, n_th, phi),
                ReservoirModel::VacuumSqueezed if n_th != 0.0 => {
                    return Err(CliError::config("vacuum_squeezed reservoir has no thermal part; drop eta.n_th"))
                }
                ReservoirModel::VacuumSqueezed => {
                    ReservoirState::vacuum_squeezed(r.sinh().powi(2), (phi - PI) / 2.0).map(|mut b| {
                        b.r = r;
                        b
                    })
                }
            }
            .map_err(invalid("eta"))?;
            Ok(EtaScenario {
                bath,
                angle,
                gamma_t: gamma_t.clone(),
            })
        })
        .collect()
}
