mod common;

use catsim_core::{
    evolve, BathMoments, FockDensityMatrix, IntegrationPlan, Liouvillian, ModelParams, Parity, ReservoirState,
    SqueezeSchedule,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sparse(p: ModelParams, b: BathMoments, rho: &FockDensityMatrix) -> Vec<C> {
    let l = Liouvillian::build(p, SqueezeSchedule::constant(ReservoirState::vacuum()), rho.cutoff()).unwrap();
    let mut out = vec![C::new(0.0, 0.0); rho.dim() * rho.dim()];
    l.apply_with_moments(b, rho.as_slice(), &mut out);
    out
}

fn trace(v: &[C], dim: usize) -> C {
    (0..dim).map(|i| v[i * dim + i]).sum()
}

#[test]
fn sparse_matches_dense_over_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for draw in 0..60 {
        let cutoff = rng.gen_range(2..=10);
        let p = random_params(&mut rng);
        let b = random_moments(&mut rng);
        let rho = random_density_matrix(&mut rng, cutoff);
        let s = sparse(p, b, &rho);
        let d = dense_generator(&p, b, &rho);
        let rel = max_abs_diff(&s, &d) / max_abs(&d).max(1.0);
        assert!(rel < 1e-12, "draw {draw}: N_c={cutoff} {p:?} {b:?} rel={rel:e}");
    }
}

#[test]
fn documented_full_parameter_example() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = ModelParams { lambda: 2.0, g2: 0.5, chi_prime: 1.0 };
    let b = BathMoments { n: 1.3, m: C::new(2f64.sqrt(), 0.0) };
    let rho = random_density_matrix(&mut rng, 8);
    let d = dense_generator(&p, b, &rho);
    let rel = max_abs_diff(&sparse(p, b, &rho), &d) / max_abs(&d);
    assert!(rel < 1e-12, "{rel:e}");
}

#[test]
fn trace_and_hermiticity_are_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let cutoff = rng.gen_range(2..=12);
        let p = random_params(&mut rng);
        let b = random_moments(&mut rng);
        let rho = random_density_matrix(&mut rng, cutoff);
        let d = rho.dim();
        let out = sparse(p, b, &rho);
        let norm = rho.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(trace(&out, d).norm() < 1e-11 * norm.max(1.0));
        for n in 0..d {
            for m in 0..d {
                assert!((out[n * d + m] - out[m * d + n].conj()).norm() < 1e-11);
            }
        }
    }
}

#[test]
fn printed_stencil_leaks_trace_through_anomalous_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(377);
    let p = ModelParams { lambda: 1.0, g2: 0.4, chi_prime: 0.2 };
    for _ in 0..20 {
        let cutoff = rng.gen_range(4..=10);
        let b = random_moments(&mut rng);
        let b = BathMoments { n: b.n + 0.1, m: b.m };
        let b = BathMoments { m: C::from_polar((b.n * (b.n + 1.0)).sqrt(), b.m.arg()), ..b };
        let rho = random_density_matrix(&mut rng, cutoff);
        let d = rho.dim();
        let literal = literal_printed_stencil(&p, b, &rho);
        let defect = trace(&literal, d);

        // The printed N term keeps (n+1) at the cutoff, adding its own leak.
        let nc = cutoff as f64;
        let cutoff_leak = -2.0 * b.n * (nc + 1.0) * rho[(cutoff, cutoff)];
        let t = trace_a2_rho(&rho);
        let expected = -4.0 * (b.m * t + b.m.conj() * t.conj()) + cutoff_leak;
        assert!((defect - expected).norm() < 1e-12, "{defect} vs {expected}");
        // The anomalous part is −8 Re(M Tr(a²ρ)): of size 4|M Tr(a²ρ)| up to the phase.
        assert!((defect - cutoff_leak).norm() > 1e-3 * (b.m * t).norm());
        assert!((defect - cutoff_leak).norm() <= 8.0 * (b.m * t).norm() + 1e-12);
        assert!(trace(&sparse(p, b, &rho), d).norm() < 1e-11);
    }

    // Without the N leak and with ⟨a²⟩ aligned to M the defect is exactly −8|M Tr(a²ρ)|.
    let rho = FockDensityMatrix::cat(C::new(1.2, 0.0), Parity::Even, 20).unwrap();
    let b = BathMoments { n: 0.0, m: C::new(0.0, 0.0) };
    assert!(trace(&literal_printed_stencil(&p, b, &rho), rho.dim()).norm() < 1e-12);
    let b = BathMoments { n: 1.0, m: C::new(2f64.sqrt(), 0.0) };
    let t = trace_a2_rho(&rho);
    let defect = trace(&literal_printed_stencil(&p, b, &rho), rho.dim())
        + 2.0 * b.n * 21.0 * rho[(20, 20)];
    assert!((defect.re + 8.0 * (b.m * t).norm()).abs() < 1e-10, "{defect} {t}");
}

#[test]
fn two_photon_dynamics_conserve_parity() {
    let p = ModelParams { lambda: 0.0, g2: 2.0, chi_prime: 0.7 };
    let l = Liouvillian::build(p, SqueezeSchedule::constant(ReservoirState::vacuum()), 40)
        .unwrap()
        .with_loss_scale(0.0);
    let rho0 = FockDensityMatrix::cat(C::new(2.5, 0.5), Parity::Even, 40).unwrap();
    let plan = IntegrationPlan::fixed(0.02, IntegrationPlan::uniform_checkpoints(0.02, 4), None);
    let traj = evolve(&l, &rho0, &plan).unwrap();
    for cp in &traj.checkpoints {
        assert!(cp.rho.number_distribution().odd_weight < 1e-10, "τ={}", cp.tau);
    }
    // Something did happen.
    assert!(traj.last().rho.max_abs_diff(&rho0).unwrap() > 1e-3);
}
