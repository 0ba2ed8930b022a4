use catsim_core::checkpoint::{read_binary, write_binary};
use catsim_core::{
    convergence_check, evolve, FockDensityMatrix, IntegrationPlan, Liouvillian, ModelParams, Parity, ReservoirState,
    SqueezeSchedule,
};
use num_complex::Complex64 as C;

fn damping(cutoff: usize) -> Liouvillian {
    Liouvillian::build(ModelParams::default(), SqueezeSchedule::constant(ReservoirState::vacuum()), cutoff).unwrap()
}

fn mean_n_at(l: &Liouvillian, rho0: &FockDensityMatrix, tau: f64, dtau: f64) -> f64 {
    let plan = IntegrationPlan::fixed(tau, vec![], Some(dtau));
    evolve(l, rho0, &plan).unwrap().last().rho.mean_photon_number()
}

#[test]
fn damped_coherent_state_follows_closed_form() {
    let l = damping(30);
    let rho0 = FockDensityMatrix::coherent(C::new(2.0, 0.0), 30).unwrap();
    let plan = IntegrationPlan::fixed(0.5, IntegrationPlan::uniform_checkpoints(0.5, 5), None);
    let traj = evolve(&l, &rho0, &plan).unwrap();
    for cp in &traj.checkpoints {
        let exact = 4.0 * (-2.0 * cp.tau).exp();
        assert!((cp.rho.mean_photon_number() - exact).abs() < 1e-6, "τ={}", cp.tau);
    }
    assert!((traj.last().rho.mean_photon_number() - 1.4715).abs() < 1e-4);
}

#[test]
fn rk4_is_fourth_order() {
    let l = damping(30);
    let rho0 = FockDensityMatrix::coherent(C::new(2.0, 0.0), 30).unwrap();
    let exact = 4.0 * (-1.0f64).exp();
    let e1 = (mean_n_at(&l, &rho0, 0.5, 0.008) - exact).abs();
    let e2 = (mean_n_at(&l, &rho0, 0.5, 0.004) - exact).abs();
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "{e1:e} {e2:e} ratio {ratio}");
}

#[test]
fn step_halving_self_convergence() {
    let l = damping(30);
    let rho0 = FockDensityMatrix::coherent(C::new(2.0, 0.0), 30).unwrap();
    let run = |h: f64| evolve(&l, &rho0, &IntegrationPlan::fixed(0.5, vec![], Some(h))).unwrap().last().rho.clone();
    let report = convergence_check(&run(1e-4), &run(5e-5), 1e-10).unwrap();
    assert!(report.passed && report.max_diff < 1e-10, "{report:?}");

    let zero = Liouvillian::build(ModelParams::default(), SqueezeSchedule::constant(ReservoirState::vacuum()), 20)
        .unwrap()
        .with_loss_scale(0.0);
    let cat = FockDensityMatrix::cat(C::new(1.0, 0.0), Parity::Odd, 20).unwrap();
    let a = evolve(&zero, &cat, &IntegrationPlan::fixed(0.1, vec![], Some(1e-3))).unwrap();
    let b = evolve(&zero, &cat, &IntegrationPlan::fixed(0.1, vec![], Some(5e-4))).unwrap();
    assert_eq!(convergence_check(&a.last().rho, &b.last().rho, 1e-10).unwrap().max_diff, 0.0);
    assert_eq!(a.last().rho, cat);
}

#[test]
fn thermal_bath_relaxes_to_geometric_state() {
    let cutoff = 40;
    let l = Liouvillian::build(ModelParams::default(), SqueezeSchedule::constant(ReservoirState::thermal(1.0).unwrap()), cutoff)
        .unwrap();
    let traj = evolve(&l, &FockDensityMatrix::vacuum(cutoff), &IntegrationPlan::fixed(15.0, vec![], None)).unwrap();
    let p = traj.last().rho.number_distribution().probabilities;
    // Detailed balance: ρ_nn ∝ (N/(N+1))ⁿ = 2⁻ⁿ on the truncated ladder.
    let z: f64 = (0..=cutoff).map(|n| 0.5f64.powi(n as i32)).sum();
    for (n, pn) in p.iter().enumerate() {
        assert!((pn - 0.5f64.powi(n as i32) / z).abs() < 1e-8, "n={n}");
    }
    assert!((traj.last().rho.mean_photon_number() - 1.0).abs() < 1e-9);
}

#[test]
fn step_on_equals_two_stage_evolution() {
    let cutoff = 20;
    let params = ModelParams::new(4.0, 1.0, 0.3).unwrap();
    let bath = ReservoirState::thermalized_from_photons(0.5, 0.02, 0.0).unwrap();
    let tau_on = 0.1;
    let h = 1e-4;
    let switched = Liouvillian::build(params, SqueezeSchedule::step_on(bath, tau_on), cutoff).unwrap();
    let whole = evolve(&switched, &FockDensityMatrix::vacuum(cutoff), &IntegrationPlan::fixed(0.3, vec![], Some(h))).unwrap();

    let before = Liouvillian::build(params, SqueezeSchedule::constant(ReservoirState::thermal(0.02).unwrap()), cutoff).unwrap();
    let after = Liouvillian::build(params, SqueezeSchedule::constant(bath), cutoff).unwrap();
    let mid = evolve(&before, &FockDensityMatrix::vacuum(cutoff), &IntegrationPlan::fixed(tau_on, vec![], Some(h))).unwrap();
    let end = evolve(&after, &mid.last().rho, &IntegrationPlan::fixed(0.3 - tau_on, vec![], Some(h))).unwrap();
    let diff = whole.last().rho.max_abs_diff(&end.last().rho).unwrap();
    assert!(diff < 1e-10, "{diff:e}");
}

#[test]
fn adaptive_and_fixed_agree_on_pumped_oscillator() {
    let cutoff = 26;
    let params = ModelParams::from_alpha0_abs(2.0, 1.41, 1.01).unwrap();
    let l = Liouvillian::build(params, SqueezeSchedule::constant(ReservoirState::thermal(0.02).unwrap()), cutoff).unwrap();
    let rho0 = FockDensityMatrix::vacuum(cutoff);
    let fixed = evolve(&l, &rho0, &IntegrationPlan::fixed(0.5, vec![0.25], None)).unwrap();
    let adaptive = evolve(&l, &rho0, &IntegrationPlan::adaptive(0.5, vec![0.25], 1e-9, 1e-12)).unwrap();
    assert_eq!(fixed.checkpoints.len(), adaptive.checkpoints.len());
    for (a, b) in fixed.checkpoints.iter().zip(&adaptive.checkpoints) {
        assert_eq!(a.tau, b.tau);
        assert!(a.rho.max_abs_diff(&b.rho).unwrap() < 1e-7);
    }
    assert!(adaptive.stats.steps < fixed.stats.steps);
    assert!(fixed.last().rho.mean_photon_number() > 0.5);
}

#[test]
fn trace_drift_stays_small_and_checkpoints_round_trip() {
    let cutoff = 26;
    let params = ModelParams::from_alpha0_abs(2.0, 1.41, 1.01).unwrap();
    let bath = ReservoirState::thermalized_from_photons(1.0, 0.02, 0.0).unwrap();
    let l = Liouvillian::build(params, SqueezeSchedule::constant(bath), cutoff).unwrap();
    let plan = IntegrationPlan::fixed(0.2, IntegrationPlan::uniform_checkpoints(0.2, 10), None);
    let traj = evolve(&l, &FockDensityMatrix::vacuum(cutoff), &plan).unwrap();
    for cp in &traj.checkpoints {
        assert!(cp.trace_err < 1e-9);
        assert!((cp.rho.trace().re - 1.0).abs() < 1e-12);
        assert!(cp.rho.hermiticity_defect() == 0.0);
    }
    let cp = traj.last();
    let mut buf = Vec::new();
    write_binary(&cp.rho, cp.tau, &mut buf).unwrap();
    let (rho, tau) = read_binary(buf.as_slice()).unwrap();
    assert_eq!(tau, cp.tau);
    assert_eq!(rho, cp.rho);
}
