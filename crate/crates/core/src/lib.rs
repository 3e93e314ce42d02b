//! Reversion probabilistic zero forcing (RPZF).
//!
//! Each round, white vertices are forced blue by the probabilistic zero
//! forcing rule, then every blue vertex independently reverts to white
//! with probability `p`. This crate builds the exact round transition
//! matrices over coloring states, analyses them as absorbing Markov chains,
//! evaluates closed forms for structured families, simulates the process
//! and iterates mean-field approximations.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.
//!
//! ```
//! use rpzf::{analyze, critical_reversion_probability, Family, Graph, StateSpace, Variant};
//!
//! let g = Graph::family(Family::Complete { n: 7 })?;
//! let ss = StateSpace::collapsed_complete(7)?;
//! let report = analyze::<f64>(&g, &ss, 0.4, Variant::Darpzf)?;
//! assert!(report.die_out(1).unwrap() < 0.5);
//! let pd = critical_reversion_probability::<f64>(&g, &ss, 1, 1e-7)?;
//! assert!((pd.p - 0.427101).abs() < 1e-5);
//! # Ok::<(), rpzf::Error>(())
//! ```

pub mod analysis;
pub mod chain;
pub mod closedform;
pub mod error;
pub mod export;
pub mod graph;
pub mod linalg;
pub mod meanfield;
pub mod scalar;
pub mod sim;
pub mod statespace;

pub use analysis::{
    absorption_probabilities, analyze, critical_reversion_probability,
    critical_reversion_probability_with, expected_absorption_times, fundamental_matrix,
    pzf_expected_propagation_time, AbsorptionReport, CriticalOptions, CriticalProbability,
};
pub use chain::{
    build_bundle, build_forcing, build_reversion, force_probability, Partition, TransitionBundle,
    Variant,
};
pub use closedform::{threshold_sweep, BRule, Metric, ThresholdSweep};
pub use error::{Error, ErrorKind, Result};
pub use graph::{Family, Graph};
pub use linalg::{Lu, Matrix};
pub use meanfield::{mf_step, mf_trajectory, MeanFieldState, Model, Trajectory};
pub use scalar::Scalar;
pub use sim::{estimate, run_round, run_trial, Outcome, SimConfig, SimResult, TrialRecord};
pub use statespace::{ColoringState, SpaceKind, StateSpace};

/// `f64` transition bundle.
pub type Bundle = TransitionBundle<f64>;
/// `f64` absorption report.
pub type Report = AbsorptionReport<f64>;
/// `f64` dense matrix.
pub type Matrix64 = Matrix<f64>;
/// `f64` critical reversion probability result.
pub type Critical = CriticalProbability<f64>;
/// `f64` partition of a round matrix.
pub type Partition64 = Partition<f64>;
