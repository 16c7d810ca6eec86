//! Mean-spin geometry and Kitagawa-Ueda spin squeezing for the two-qubit
//! superposition of a biaxial state and the symmetric Bell state `|10>`.
//!
//! Two independent paths are provided. [`closedform`] evaluates the printed
//! analytic expressions; [`oracle`] computes the same quantities directly from
//! the state vector and spin matrices. [`crosscheck`] compares them over a
//! parameter grid and reports which sign and normalisation conventions make
//! them agree. [`sweep`] and [`figure`] turn the pipeline into plot-ready data.

pub mod closedform;
pub mod crosscheck;
pub mod error;
pub mod figure;
pub mod frame;
pub mod minimize;
pub mod oracle;
pub mod spin;
pub mod sweep;

pub use closedform::{
    cartesian_from_raising, frame_moments_closed_form, frame_moments_from_moments,
    second_moments_closed_form, squeezing_paper_literal, squeezing_standard, CartesianMoments,
    FrameMoments, MomentSet,
};
pub use crosscheck::{run_crosscheck, CrosscheckReport, Eq12Hypothesis, NuSignHypothesis};
pub use error::{Error, Result};
pub use figure::{run_figure, write_figure, FigureName, FigureOutput, FigureSummary};
pub use frame::{
    compute_frame, mean_spin_closed_form, mean_spin_length, mean_spin_length_closed_form,
    project_transverse_operators, FrameStatus, MeanSpin, SpinFrame,
};
pub use oracle::{
    concurrence, min_transverse_variance, min_variance_all_directions, moments_oracle,
    squeeze_oracle, SqueezeMethod, SqueezeResult,
};
pub use spin::{
    build_spin_operators, build_superposition_state, expectation, SpinOperatorSet, SqueezeParams,
    StateVector,
};
pub use sweep::{run_sweep, Convention, OutputFormat, SweepRow, SweepSpec};
