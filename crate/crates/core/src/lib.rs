//! Discrete and continuous quantum walks on the hypercube, with classical
//! baselines for hitting-time comparisons.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! [`exact`] module evaluates the same quantities over big rationals.

pub mod calibrated;
pub mod classical;
pub mod coined;
pub mod continuous;
pub mod error;
pub mod exact;
pub mod hilbert;
pub mod horizon;
pub mod measured;
pub mod scalar;
pub mod spectral;

pub use classical::{
    continuous_classical_hitting, directional_walk_hitting, exact_corner_hitting, monte_carlo_hitting, HittingEstimate,
    WeightChain,
};
pub use coined::{evolve, grover_coin, resting_coin, Coin, StepOperator, SymmetricCoin};
pub use continuous::{continuous_alpha, continuous_gamma, continuous_measured_trace, PositionState, ProductState};
pub use error::{Result, WalkError};
pub use hilbert::{make_initial, LatticeSpec, PositionProjector, ProjectorRank, Vertex, WalkState};
pub use horizon::{default_horizon, parity_matched, return_horizon};
pub use measured::{
    amplified_concurrent, concurrent_hitting, measured_trace, one_shot_probability, Amplification, Engine, HittingKind,
    HittingResult, MeasuredTrace, TraceTarget, MAX_DIRECT_N,
};
pub use scalar::{Amplitude, KahanSum, Real};
pub use spectral::{eigenpair, EigenPair, SpectralSeries};

pub type WalkState64 = WalkState<f64>;
pub type WalkState32 = WalkState<f32>;
pub type StepOperator64 = StepOperator<f64>;
pub type StepOperator32 = StepOperator<f32>;
pub type SpectralSeries64 = SpectralSeries<f64>;
pub type SpectralSeries32 = SpectralSeries<f32>;
pub type MeasuredTrace64 = MeasuredTrace<f64>;
pub type MeasuredTrace32 = MeasuredTrace<f32>;
pub type PositionState64 = PositionState<f64>;
pub type Complex64 = num_complex::Complex<f64>;
