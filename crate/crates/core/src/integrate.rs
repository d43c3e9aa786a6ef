//! Adaptive Dormand–Prince 5(4) integration of the Maxwell–Bloch system.
//!
//! Only the independent components of the state are advanced, so Hermiticity
//! is exact. The three populations are all integrated; the right-hand side has
//! zero trace, so any drift of the trace away from one is accumulated
//! round-off and is tracked per step.

use serde::{Deserialize, Serialize};

use crate::dynamics::Dynamics;
use crate::error::{IntegrateError, StateError};
use crate::params::ModelParams;
use crate::state::{SpaserState, PACKED_LEN};

type Vec11 = [f64; PACKED_LEN];

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI step-size control (Hairer–Wanner defaults).
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorControls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step, s. `None` selects 0.1/γ_n.
    pub max_step: Option<f64>,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Minimum spacing of recorded trajectory points, s. Zero records every
    /// accepted step. The final point is always recorded.
    pub record_interval: f64,
    /// Largest tolerated |tr ρ − 1|.
    pub trace_limit: f64,
    /// Populations must stay in [−tol, 1 + tol].
    pub population_tol: f64,
}

impl Default for IntegratorControls {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_step: None,
            initial_step: None,
            max_steps: 50_000_000,
            record_interval: 0.0,
            trace_limit: 1e-6,
            population_tol: 1e-6,
        }
    }
}

impl IntegratorControls {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<(), IntegrateError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(IntegrateError::Controls("tolerances must be > 0"));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(IntegrateError::Controls("max_step must be > 0"));
            }
        }
        if !(self.record_interval >= 0.0) {
            return Err(IntegrateError::Controls("record_interval must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: SpaserState,
    pub plasmon_number: f64,
    /// |tr ρ − 1| at this point.
    pub trace_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
    pub max_trace_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectory always holds the initial point")
    }
}

/// Whether an observer wants the run to go on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Outcome of [`integrate_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunEnd {
    pub t: f64,
    pub state: SpaserState,
    pub stats: StepStats,
    /// Set when the observer asked to stop before `t_end`.
    pub stopped_early: bool,
}

/// Integrates to `t_end`, recording a trajectory.
pub fn integrate(
    state0: &SpaserState,
    params: &ModelParams,
    t_end: f64,
    controls: &IntegratorControls,
) -> Result<Trajectory, IntegrateError> {
    let mut points = vec![point(0.0, *state0)];
    let mut last_recorded = 0.0;
    let end = integrate_with(state0, params, t_end, controls, |t, s| {
        if t - last_recorded >= controls.record_interval {
            points.push(point(t, *s));
            last_recorded = t;
        }
        Flow::Continue
    })?;
    if points.last().map(|p| p.t) != Some(end.t) {
        points.push(point(end.t, end.state));
    }
    Ok(Trajectory { points, stats: end.stats })
}

fn point(t: f64, state: SpaserState) -> TrajectoryPoint {
    TrajectoryPoint {
        t,
        state,
        plasmon_number: state.plasmon_number(),
        trace_error: (state.rho.trace() - 1.0).abs(),
    }
}

/// Integrates to `t_end`, calling `observer` after every accepted step.
pub fn integrate_with<F>(
    state0: &SpaserState,
    params: &ModelParams,
    t_end: f64,
    controls: &IntegratorControls,
    mut observer: F,
) -> Result<RunEnd, IntegrateError>
where
    F: FnMut(f64, &SpaserState) -> Flow,
{
    params.validate()?;
    controls.validate()?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(IntegrateError::Controls("t_end must be finite and > 0"));
    }
    state0.rho.validate(controls.trace_limit.max(controls.population_tol))?;

    let dynamics = Dynamics::new(params);
    let max_step = controls.max_step.unwrap_or(0.1 / params.plasmon.gamma_n).min(t_end);

    let mut stats = StepStats::default();
    let mut t = 0.0;
    let mut y = state0.pack();
    let mut k1 = [0.0; PACKED_LEN];
    dynamics.rhs(&y, &mut k1);
    stats.rhs_evaluations += 1;

    let mut h = match controls.initial_step {
        Some(h0) => h0.min(max_step),
        None => initial_step(&dynamics, &y, &k1, controls, max_step),
    };
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    let mut k2 = [0.0; PACKED_LEN];
    let mut k3 = [0.0; PACKED_LEN];
    let mut k4 = [0.0; PACKED_LEN];
    let mut k5 = [0.0; PACKED_LEN];
    let mut k6 = [0.0; PACKED_LEN];
    let mut k7 = [0.0; PACKED_LEN];
    let mut stage = [0.0; PACKED_LEN];
    let mut y_new = [0.0; PACKED_LEN];

    while t < t_end {
        if stats.accepted + stats.rejected >= controls.max_steps {
            return Err(IntegrateError::StepBudget {
                t,
                max_steps: controls.max_steps,
                last: Box::new(SpaserState::unpack(&y)),
            });
        }
        let final_step = t + 1.01 * h >= t_end;
        if final_step {
            h = t_end - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
            return Err(IntegrateError::StepUnderflow {
                t,
                h,
                last: Box::new(SpaserState::unpack(&y)),
            });
        }

        combine(&mut stage, &y, h, &[(A21, &k1)]);
        dynamics.rhs(&stage, &mut k2);
        combine(&mut stage, &y, h, &[(A31, &k1), (A32, &k2)]);
        dynamics.rhs(&stage, &mut k3);
        combine(&mut stage, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        dynamics.rhs(&stage, &mut k4);
        combine(&mut stage, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        dynamics.rhs(&stage, &mut k5);
        combine(&mut stage, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        dynamics.rhs(&stage, &mut k6);
        combine(&mut y_new, &y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        dynamics.rhs(&y_new, &mut k7);
        stats.rhs_evaluations += 6;

        let mut err_sq = 0.0;
        for i in 0..PACKED_LEN {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = controls.abs_tol + controls.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / PACKED_LEN as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(0.2 - 0.75 * BETA);
        if err <= 1.0 {
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            fac_old = err.max(1e-4);
            t = if final_step { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;

            let state = SpaserState::unpack(&y);
            let drift = (state.rho.trace() - 1.0).abs();
            stats.max_trace_error = stats.max_trace_error.max(drift);
            if drift > controls.trace_limit {
                return Err(IntegrateError::TraceDrift { t, drift, last: Box::new(state) });
            }
            if let Some((level, &value)) = state
                .rho
                .populations
                .iter()
                .enumerate()
                .find(|(_, &p)| !(p >= -controls.population_tol && p <= 1.0 + controls.population_tol))
            {
                log::debug!("population {} left its bounds at t = {t:e}", level + 1);
                return Err(IntegrateError::InvalidState {
                    t,
                    source: StateError::Population { level: level + 1, value, tol: controls.population_tol },
                    last: Box::new(state),
                });
            }

            if observer(t, &state) == Flow::Stop {
                return Ok(RunEnd { t, state, stats, stopped_early: true });
            }

            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new.min(max_step);
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }

    Ok(RunEnd { t, state: SpaserState::unpack(&y), stats, stopped_early: false })
}

fn combine(out: &mut Vec11, y: &Vec11, h: f64, terms: &[(f64, &Vec11)]) {
    for i in 0..PACKED_LEN {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Starting step from the Hairer–Nørsett–Wanner heuristic.
fn initial_step(
    dynamics: &Dynamics,
    y: &Vec11,
    f0: &Vec11,
    controls: &IntegratorControls,
    max_step: f64,
) -> f64 {
    let scale = |i: usize| controls.abs_tol + controls.rel_tol * y[i].abs();
    let norm = |v: &Vec11| {
        (v.iter().enumerate().map(|(i, x)| (x / scale(i)).powi(2)).sum::<f64>() / PACKED_LEN as f64)
            .sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 / dynamics.rate_scale().max(1.0) } else { 0.01 * d0 / d1 };
    let h0 = h0.min(max_step);
    let mut y1 = [0.0; PACKED_LEN];
    combine(&mut y1, y, h0, &[(1.0, f0)]);
    let mut f1 = [0.0; PACKED_LEN];
    dynamics.rhs(&y1, &mut f1);
    let mut diff = [0.0; PACKED_LEN];
    for i in 0..PACKED_LEN {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 / dynamics.rate_scale().max(1.0))
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(max_step)
}
