//! Frames on Hermitian operator spaces and finite-shot quantum measurement.
//!
//! A POVM on a `d`-dimensional system is read as a frame on the real space of
//! Hermitian operators. Measurement probabilities become frame coefficients,
//! and finite-shot noise becomes coefficient noise, so state estimation and
//! hypothesis testing can both be analysed with ordinary frame tools.

pub mod coord_frame;
pub mod detection;
pub mod error;
pub mod estimation;
pub mod herm_space;
pub mod povm;
pub mod sampling_stats;

pub use coord_frame::{
    expected_recon_error, mercedes_benz_frame, CoordFrame, CoordVector, DualFrame, DualKind,
    EntfReport, FrameBounds, NoiseSpec,
};
pub use detection::{
    orientation_sweep, prob_error, qdoc_exact, qdoc_monte_carlo, BinaryHypothesis, Hypothesis,
    OrientationSweepResult, QdocCurve, QdocMethod, QdocPoint,
};
pub use error::{Error, Result};
pub use estimation::{
    analytic_prediction, run_experiment, tradeoff_grid, EstimationConfig, EstimationModel,
    EstimationSummary, Prediction, TrialRecord,
};
pub use herm_space::{density_from_bloch, hs_inner, pure_state, HermBasis, HermitianOp, OpCoords};
pub use povm::{platonic_povm, IcKind, IcReport, PlatonicSpec, Povm, Solid, ValidationReport};
pub use sampling_stats::{sample_counts, OutcomeCounts, RelFreq};
