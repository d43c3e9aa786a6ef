use thiserror::Error;

use crate::state::SpaserState;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParamError {
    #[error("invalid parameter {path} = {value:e}: {rule}")]
    Invalid { path: String, value: f64, rule: &'static str },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StateError {
    #[error("state is not finite")]
    NonFinite,
    #[error("density matrix trace deviates from 1 by {deviation:e}")]
    Trace { deviation: f64 },
    #[error("population rho[{level}][{level}] = {value:e} outside [-{tol:e}, 1+{tol:e}]")]
    Population { level: usize, value: f64, tol: f64 },
}

#[derive(Debug, Clone, Error)]
pub enum IntegrateError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("invalid initial state: {0}")]
    InitialState(#[from] StateError),
    #[error("invalid integrator controls: {0}")]
    Controls(&'static str),
    #[error("step size underflow at t = {t:e} s (h = {h:e} s); system too stiff for the explicit scheme")]
    StepUnderflow { t: f64, h: f64, last: Box<SpaserState> },
    #[error("trace drift {drift:e} exceeds limit at t = {t:e} s")]
    TraceDrift { t: f64, drift: f64, last: Box<SpaserState> },
    #[error("state left the physical domain at t = {t:e} s: {source}")]
    InvalidState { t: f64, source: StateError, last: Box<SpaserState> },
    #[error("step budget of {max_steps} exhausted at t = {t:e} s")]
    StepBudget { t: f64, max_steps: usize, last: Box<SpaserState> },
}

impl IntegrateError {
    /// Last accepted state, when the failure happened mid-run.
    pub fn last_state(&self) -> Option<&SpaserState> {
        match self {
            IntegrateError::StepUnderflow { last, .. }
            | IntegrateError::TraceDrift { last, .. }
            | IntegrateError::StepBudget { last, .. }
            | IntegrateError::InvalidState { last, .. } => Some(last),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("closed-form steady state requires a resonant drive (delta_a = 0), got {0:e}")]
    DetunedDrive(f64),
    #[error("degenerate parameters: {0}")]
    Degenerate(&'static str),
    #[error("fixed-point iteration for the spasing frequency did not converge after {iterations} iterations")]
    FrequencyNotConverged { iterations: usize },
    #[error(
        "no sign change of the spasing criterion in pump bracket [{lo:e}, {hi:e}] rad/s \
         (residuals {residual_lo:e}, {residual_hi:e})"
    )]
    NoThreshold { lo: f64, hi: f64, residual_lo: f64, residual_hi: f64 },
    #[error("eigenvalue computation failed: {0}")]
    Eigen(&'static str),
    #[error("steady state not found: {0}")]
    SteadyState(String),
    #[error("calibration target {target} unattainable in bracket; achieved ratios: {curve:?}")]
    CalibrationUnattainable { target: f64, curve: Vec<(f64, f64)> },
}
