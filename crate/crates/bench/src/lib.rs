//! Fixtures shared by the kernel benchmarks.

use catsim_core::{FockDensityMatrix, Liouvillian, ModelParams, Parity, ReservoirState, SqueezeSchedule};
use num_complex::Complex64;

/// Pumped, Kerr-free generator with a squeezed vacuum bath at cutoff `n`.
pub fn pumped(cutoff: usize) -> Liouvillian {
    let params = ModelParams::from_g(625.0, 2.5, 0.0).expect("valid parameters");
    let bath = ReservoirState::thermalized_from_photons(1.0, 0.0, 0.0).expect("valid bath");
    Liouvillian::build(params, SqueezeSchedule::constant(bath), cutoff).expect("valid generator")
}

/// Even cat whose support roughly fills a basis of size `cutoff`.
pub fn cat_filling(cutoff: usize) -> FockDensityMatrix {
    let alpha = ((cutoff as f64 + 9.0).sqrt() - 3.0).max(0.5) * 0.8;
    FockDensityMatrix::cat(Complex64::new(alpha, 0.0), Parity::Even, cutoff).expect("cutoff covers the cat")
}
