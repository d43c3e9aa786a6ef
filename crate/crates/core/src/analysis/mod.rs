//! Steady states, thresholds, stability and frequency of the spaser.

mod calibrate;
mod closed_form;
mod condition;
mod frequency;
pub mod jacobian;
mod limits;
mod stability;
mod steady;
mod threshold;

pub use closed_form::{background_state_closed_form, steady_inversions_closed_form, ClosedFormInversions};
pub use condition::spasing_condition_residual;
pub use limits::{limit_strong_drive, limit_weak_drive};
pub use frequency::{refine_frequency, spasing_frequency, spasing_frequency_formula, FREQUENCY_TOLERANCE, MAX_FREQUENCY_ITERATIONS};
pub use stability::{background_state, growth_rate, Mode, StabilityResult};
pub use threshold::{
    threshold_bracket, threshold_criterion, threshold_find, threshold_find_auto, ThresholdResult, AUTO_PUMP_RANGE,
    ESTIMATOR_AGREEMENT, THRESHOLD_REL_TOL,
};
pub use steady::{
    phase_invariant_residual, steady_residual, steady_state_algebraic, steady_state_numeric, steady_state_relaxation,
    BranchHint, SteadyMethod, SteadyOptions, SteadyStateResult,
};
pub use calibrate::{calibrate_coupling, threshold_ratio, CalibrationResult, CalibrationTargets};
