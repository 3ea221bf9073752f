//! Two-qubit entanglement from joint phase measurements.
//!
//! The crate computes Γ, a two-qubit quantity read off the Fourier
//! components of a joint phase distribution, and Γ_sup, its maximum over
//! local unitaries, together with the concurrence and partial-transpose
//! criteria it is compared against and a simulated Bell-analyzer
//! experiment that estimates Γ_sup from detection counts.

pub mod bell_analyzer;
pub mod descriptor;
pub mod error;
pub mod gamma_sup;
pub mod local_unitary;
pub mod measures;
pub mod optimize;
pub mod phase_povm;
pub mod qmath;
pub mod rng;
pub mod states;
pub mod tolerance;
pub mod validation;

pub use bell_analyzer::{
    bell_probabilities, corner_differences, measured_abs_corners, protocol_gamma_sup,
    sample_bell_outcomes, visibility, BellProbabilities, ProtocolResult, ShotRecord, VisibilitySigns,
};
pub use descriptor::StateDescriptor;
pub use error::{Error, Result};
pub use gamma_sup::{brute_force_oracle, coordinate_ascent, gamma_at, gamma_sup, GammaSupResult, OracleResult};
pub use local_unitary::{FullLocalUnitary, LocalUnitaryParams, PhaseOnlyParams};
pub use measures::{concurrence_mixed, concurrence_pure, is_ppt, measure_report, negativity, partial_transpose, MeasureReport};
pub use optimize::OptimizerConfig;
pub use phase_povm::{gamma_closed_form, gamma_numeric, joint_phase_distribution, JointPhaseDistribution, PhaseGrid};
pub use qmath::{Mat2, Mat4, C64};
pub use rng::RngSeed;
pub use states::{BellKind, DensityMatrix, PureState};
pub use tolerance::{Tolerances, TOL};
pub use validation::{run_validation, ValidationLevel, ValidationSummary};
