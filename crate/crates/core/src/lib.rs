//! Fock-basis simulation of cat-state formation in a degenerate parametric
//! oscillator driven by squeezed or thermal reservoirs.
//!
//! The pipeline is: pick [`ModelParams`] and a [`SqueezeSchedule`], build a
//! [`Liouvillian`] on a truncated basis, [`evolve`] an initial
//! [`FockDensityMatrix`], then reduce checkpoints to signatures (purity,
//! Wigner negativity, l1 coherence, parity weight, quadrature fringes).

pub mod checkpoint;
pub mod decoherence;
pub mod error;
pub mod fock;
pub mod integrator;
pub mod liouvillian;
pub mod reservoir;
pub mod signatures;
pub mod special;

pub use decoherence::{eta, eta_curve, EtaScenario, FringeAngle};
pub use error::{Error, Result};
pub use fock::{FockDensityMatrix, NumberDistribution, Parity};
pub use integrator::{
    convergence_check, evolve, evolve_with, Checkpoint, ConvergenceReport, EvolveStats, IntegrationPlan, Stepping,
    Trajectory, TrajectoryRecord,
};
pub use liouvillian::{Liouvillian, ModelParams};
pub use reservoir::{BathMoments, ReservoirModel, ReservoirState, ScheduleMode, SqueezeSchedule};
pub use signatures::{AxisGrid, QuadratureGrid, SignatureOptions, WignerGrid};
