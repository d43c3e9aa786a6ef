//! Three-level gain medium coupled to a single plasmon mode, with an external
//! coherent drive on the upper transition.
//!
//! The crate provides the equations of motion, an adaptive integrator, and
//! analysis routines for steady states, spasing thresholds, linear stability
//! and the spasing frequency.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod params;
pub mod rates;
pub mod state;
pub mod units;

pub use dynamics::{equations_of_motion, Dynamics, EomError};
pub use error::{AnalysisError, IntegrateError, ParamError, StateError};
pub use integrate::{integrate, integrate_with, Flow, IntegratorControls, RunEnd, Trajectory, TrajectoryPoint};
pub use params::{DriveParams, FrameParams, GainParams, ModelParams, PlasmonParams};
pub use rates::{complex_rates, ComplexRates};
pub use state::{DensityMatrix3, Observables, SpaserState, StateRate};
