//! Steady states of the full nonlinear system.
//!
//! Two independent routes are provided. The algebraic route uses that, for a
//! fixed real amplitude a and frame frequency ν, the density-matrix equations
//! are affine; the slaved ρ(a, ν) then feeds back into the amplitude equation
//! through the complex gain G = iN_pΩ̃_b ρ₂₁/a. A steady spasing state is a
//! root of G − Γ_n(ν), followed by continuation in N = a² from the linear
//! onset and polished with Newton's method on the 10 real unknowns (8 for ρ,
//! real a, ν). The relaxation route integrates the equations of motion until
//! a phase-invariant residual vanishes.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::jacobian::{analytic_jacobian, expand, reduced_from, reduced_rhs, Reduced, AMP, REDUCED_LEN, RHO21, RHO31};
use crate::analysis::frequency::nearest_root;
use crate::analysis::stability::{background_state, balance, growth_rate, spectrum, StabilityResult};
use crate::dynamics::Dynamics;
use crate::error::AnalysisError;
use crate::integrate::{integrate_with, Flow, IntegratorControls};
use crate::params::ModelParams;
use crate::state::{DensityMatrix3, Observables, SpaserState};

const RHO_LEN: usize = AMP;
const CONTINUATION_POINTS: usize = 240;
const NEWTON_ITERATIONS: usize = 60;
/// Residual below which a stalled relaxation is handed to Newton polishing.
const PLATEAU_RESIDUAL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyMethod {
    OdeRelaxation,
    AlgebraicRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchHint {
    /// The non-spasing state, whatever its stability.
    Zero,
    /// The spasing state when the non-spasing one is unstable.
    Spasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyOptions {
    /// Largest accepted scaled residual.
    pub tol: f64,
    /// Initial amplitude for the relaxation route.
    pub seed_amplitude: f64,
    /// Longest relaxation time, s.
    pub t_max: f64,
    /// Accepted steps between residual checks during relaxation.
    pub check_every: usize,
    pub controls: IntegratorControls,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed_amplitude: 1e-3,
            t_max: 1e-8,
            check_every: 64,
            // Near a fixed point the step is limited by stability, not by
            // the plasmon period, so the default step cap is lifted.
            controls: IntegratorControls {
                rel_tol: 1e-9,
                abs_tol: 1e-12,
                max_step: Some(f64::INFINITY),
                ..IntegratorControls::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateResult {
    /// Coherent plasmon number N_n = |a|².
    pub plasmon_number: f64,
    pub n21: f64,
    pub n32: f64,
    pub rho: DensityMatrix3,
    /// Amplitude in the gauge Im a = 0, a ≥ 0.
    pub amplitude: f64,
    /// Oscillation frequency of the plasmon field, rad/s.
    pub nu_s: f64,
    pub residual_norm: f64,
    pub method: SteadyMethod,
    pub converged: bool,
    /// No perturbation grows (the phase direction excluded).
    pub stable: bool,
}

impl SteadyStateResult {
    pub fn state(&self) -> SpaserState {
        SpaserState::new(self.rho, Complex64::new(self.amplitude, 0.0))
    }

    pub fn observables(&self) -> Observables {
        self.state().observables()
    }
}

/// Largest component of f(state), with density-matrix rates scaled by the
/// fastest rate of the problem and the amplitude rate additionally by
/// max(|a|, 1).
pub fn steady_residual(params: &ModelParams, state: &SpaserState) -> f64 {
    let d = Dynamics::new(params);
    let x = state.pack();
    let mut f = [0.0; 11];
    d.rhs(&x, &mut f);
    let scale = d.rate_scale().max(f64::MIN_POSITIVE);
    let amp_scale = scale * state.amplitude.norm().max(1.0);
    let rho = f[..9].iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale;
    let amp = Complex64::new(f[9], f[10]).norm() / amp_scale;
    rho.max(amp)
}

/// Residual of a state that may still carry a global phase rotation: the
/// rotation rate is read off the amplitude and removed by moving the frame.
/// Returns the residual and the implied lab frequency.
pub fn phase_invariant_residual(params: &ModelParams, state: &SpaserState) -> (f64, f64) {
    let d = Dynamics::new(params);
    let mut f = [0.0; 11];
    d.rhs(&state.pack(), &mut f);
    let a = state.amplitude;
    let a_dot = Complex64::new(f[9], f[10]);
    let shift = if a.norm_sqr() > 0.0 { -(a_dot * a.conj()).im / a.norm_sqr() } else { 0.0 };
    let nu = params.frame.nu_ref + shift;
    (steady_residual(&params.in_frame(nu), state), nu)
}

/// The branch requested by `hint`, found algebraically with relaxation as a
/// fallback.
pub fn steady_state_numeric(params: &ModelParams, hint: BranchHint, opts: &SteadyOptions) -> Result<SteadyStateResult, AnalysisError> {
    params.validate()?;
    let stability = growth_rate(params)?;
    if hint == BranchHint::Zero || stability.gamma_s <= 0.0 {
        return Ok(zero_branch(params, &stability));
    }
    let algebraic = steady_state_algebraic(params, opts);
    match &algebraic {
        Ok(r) if r.converged && r.stable => return algebraic,
        Ok(r) if r.converged => log::warn!("spasing state at N = {:.6e} is unstable; trying relaxation", r.plasmon_number),
        Ok(r) => log::warn!("algebraic steady state not converged (residual {:.3e}); trying relaxation", r.residual_norm),
        Err(e) => log::warn!("algebraic steady state failed: {e}; trying relaxation"),
    }
    match steady_state_relaxation(params, BranchHint::Spasing, opts) {
        Ok(r) if r.converged => Ok(r),
        relaxed => match algebraic {
            Ok(r) if r.converged => Ok(r),
            _ => Err(AnalysisError::SteadyState(match relaxed {
                Ok(r) => format!("relaxation did not settle (residual {:.3e})", r.residual_norm),
                Err(e) => format!("relaxation failed: {e}"),
            })),
        },
    }
}

fn zero_branch(params: &ModelParams, stability: &StabilityResult) -> SteadyStateResult {
    let rho = stability.background;
    let state = SpaserState::new(rho, Complex64::new(0.0, 0.0));
    let o = state.observables();
    SteadyStateResult {
        plasmon_number: 0.0,
        n21: o.n21,
        n32: o.n32,
        rho,
        amplitude: 0.0,
        nu_s: stability.leading.frequency,
        residual_norm: steady_residual(params, &state),
        method: SteadyMethod::AlgebraicRoot,
        converged: true,
        stable: stability.gamma_s <= 0.0,
    }
}

/// Density matrix slaved to a fixed real amplitude.
fn slaved_rho(d: &Dynamics, a: f64) -> Option<Reduced> {
    let mut z: Reduced = [0.0; REDUCED_LEN];
    z[AMP] = a;
    let j = analytic_jacobian(d, &z);
    let f0 = reduced_rhs(d, &z);
    let m = j.fixed_view::<RHO_LEN, RHO_LEN>(0, 0).into_owned();
    let b = -SVector::<f64, RHO_LEN>::from_fn(|i, _| f0[i]);
    let sol = m.lu().solve(&b)?;
    z[..RHO_LEN].copy_from_slice(sol.as_slice());
    Some(z)
}

/// ȧ/a with the density matrix slaved, in the frame rotating at `nu`.
fn net_gain(params: &ModelParams, n: f64, nu: f64) -> Result<Complex64, AnalysisError> {
    let framed = params.in_frame(nu);
    let d = Dynamics::new(&framed);
    let a = n.sqrt();
    let z = slaved_rho(&d, a).ok_or(AnalysisError::Degenerate("singular slaved density-matrix system"))?;
    let rho21 = Complex64::new(z[RHO21], z[RHO21 + 1]);
    Ok(Complex64::i() * (d.n_p * d.coupling) * rho21 / a - d.rates.gamma_n)
}

/// Frequency nearest `nu0` at which the slaved gain has no phase mismatch.
fn track_frequency(params: &ModelParams, n: f64, nu0: f64, width: f64) -> Result<f64, AnalysisError> {
    nearest_root(|nu| net_gain(params, n, nu).map(|r| r.im), nu0, width, width)
        .map_err(|_| AnalysisError::SteadyState(format!("frequency tracking failed at N = {n:.3e}")))
}

/// Spasing steady state by continuation in the plasmon number and Newton
/// polishing. Requires the non-spasing state to be unstable.
pub fn steady_state_algebraic(params: &ModelParams, opts: &SteadyOptions) -> Result<SteadyStateResult, AnalysisError> {
    params.validate()?;
    let stability = growth_rate(params)?;
    if stability.gamma_s <= 0.0 {
        return Err(AnalysisError::SteadyState("non-spasing state is stable; no spasing branch from onset".into()));
    }
    let pump = params.gain.pump_g;
    // Energy balance: each emitted plasmon needs one pump cycle, so
    // 2γ_n N ≤ N_p g.
    let n_max = 1.05 * params.plasmon.n_p * pump / (2.0 * params.plasmon.gamma_n);
    let width = {
        let r = crate::rates::complex_rates(params);
        r.gamma21.re + r.gamma31.re + params.drive.omega_a_rabi + params.plasmon.gamma_n + (params.gain.omega21 - params.plasmon.omega_n).abs()
    };

    let n_start = 1e-12 * n_max;
    let ratio = (n_max / n_start).ln() / (CONTINUATION_POINTS - 1) as f64;
    let mut nu = track_frequency(params, n_start, stability.leading.frequency, width)?;
    if net_gain(params, n_start, nu)?.re <= 0.0 {
        return Err(AnalysisError::SteadyState("no net gain at vanishing amplitude on the tracked mode".into()));
    }
    let mut lo = (n_start, nu);
    let mut hi = None;
    for k in 1..CONTINUATION_POINTS {
        let n = n_start * (ratio * k as f64).exp();
        nu = track_frequency(params, n, lo.1, width)?;
        if net_gain(params, n, nu)?.re <= 0.0 {
            hi = Some(n);
            break;
        }
        lo = (n, nu);
    }
    let mut hi = hi.ok_or_else(|| AnalysisError::SteadyState("gain never saturates below the energy-balance bound".into()))?;
    while hi / lo.0 - 1.0 > 1e-13 {
        let mid = (lo.0 * hi).sqrt();
        if mid <= lo.0 || mid >= hi {
            break;
        }
        let nu_mid = track_frequency(params, mid, lo.1, width)?;
        if net_gain(params, mid, nu_mid)?.re > 0.0 {
            lo = (mid, nu_mid);
        } else {
            hi = mid;
        }
    }

    let (n, nu) = lo;
    let framed = params.in_frame(nu);
    let z = slaved_rho(&Dynamics::new(&framed), n.sqrt()).ok_or(AnalysisError::Degenerate("singular slaved density-matrix system"))?;
    let (z, nu) = polish(params, z, nu, opts.tol);
    Ok(finish(params, z, nu, opts.tol, SteadyMethod::AlgebraicRoot))
}

type Mat10 = SMatrix<f64, REDUCED_LEN, REDUCED_LEN>;

/// Damped Newton on (ρ, Re a, ν) with Im a = 0.
fn polish(params: &ModelParams, mut z: Reduced, mut nu: f64, tol: f64) -> (Reduced, f64) {
    let norm = |z: &Reduced, nu: f64| steady_residual(&params.in_frame(nu), &expand(z));
    let mut current = norm(&z, nu);
    for _ in 0..NEWTON_ITERATIONS {
        if current <= tol * 1e-3 {
            break;
        }
        let framed = params.in_frame(nu);
        let d = Dynamics::new(&framed);
        let f = reduced_rhs(&d, &z);
        let j = analytic_jacobian(&d, &z);
        let mut m = Mat10::zeros();
        for c in 0..=AMP {
            m.set_column(c, &j.column(c));
        }
        // ∂f/∂ν: the frame enters through −iΔ in Γ₂₁, Γ₃₁ and Γ_n.
        let i = Complex64::i();
        let dr21 = i * Complex64::new(z[RHO21], z[RHO21 + 1]);
        let dr31 = i * Complex64::new(z[RHO31], z[RHO31 + 1]);
        let da = i * Complex64::new(z[AMP], z[AMP + 1]);
        m[(RHO21, 9)] = dr21.re;
        m[(RHO21 + 1, 9)] = dr21.im;
        m[(RHO31, 9)] = dr31.re;
        m[(RHO31 + 1, 9)] = dr31.im;
        m[(AMP, 9)] = da.re;
        m[(AMP + 1, 9)] = da.im;
        let rhs = -SVector::<f64, REDUCED_LEN>::from_column_slice(&f);
        let Some(step) = m.lu().solve(&rhs) else { break };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let mut trial = z;
            for k in 0..=AMP {
                trial[k] += t * step[k];
            }
            trial[AMP + 1] = 0.0;
            let trial_nu = nu + t * step[9];
            let r = norm(&trial, trial_nu);
            if r < current {
                z = trial;
                nu = trial_nu;
                current = r;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (z, nu)
}

fn finish(params: &ModelParams, z: Reduced, nu: f64, tol: f64, method: SteadyMethod) -> SteadyStateResult {
    let framed = params.in_frame(nu);
    let mut state = expand(&z);
    let phase = state.amplitude.arg();
    state = state.rotate_phase(-phase);
    state.amplitude = Complex64::new(state.amplitude.norm(), 0.0);
    let residual_norm = steady_residual(&framed, &state);
    let stable = is_stable(&framed, &state);
    let o = state.observables();
    SteadyStateResult {
        plasmon_number: o.plasmon_number,
        n21: o.n21,
        n32: o.n32,
        rho: state.rho,
        amplitude: state.amplitude.re,
        nu_s: nu,
        residual_norm,
        method,
        converged: residual_norm <= tol,
        stable,
    }
}

/// Linear stability of a spasing fixed point. The global phase leaves one
/// zero eigenvalue, which is excluded.
fn is_stable(framed: &ModelParams, state: &SpaserState) -> bool {
    let d = Dynamics::new(framed);
    let j = balance(analytic_jacobian(&d, &reduced_from(&state.rho, state.amplitude)), framed.plasmon.n_p);
    let Ok(mut ev) = spectrum(&j) else { return false };
    let Some(k) = (0..ev.len()).min_by(|&a, &b| ev[a].norm().total_cmp(&ev[b].norm())) else { return false };
    ev.remove(k);
    let slack = 1e-9 * d.rate_scale();
    ev.iter().all(|z| z.re <= slack)
}

/// Steady state by integrating the equations of motion from the gain-medium
/// background (plus a seed amplitude for the spasing branch) until the
/// phase-invariant residual drops below `opts.tol` or `opts.t_max` elapses.
pub fn steady_state_relaxation(params: &ModelParams, hint: BranchHint, opts: &SteadyOptions) -> Result<SteadyStateResult, AnalysisError> {
    params.validate()?;
    let background = background_state(params)?;
    let seed = if hint == BranchHint::Spasing { opts.seed_amplitude } else { 0.0 };
    let start = SpaserState::new(background, Complex64::new(seed, 0.0));

    // The integrated trajectory settles onto the fixed point only to within
    // its local error, so the residual plateaus; the relaxed state is then
    // polished by Newton's method, which keeps the basin chosen by the
    // dynamics.
    let mut steps = 0usize;
    let mut last = f64::INFINITY;
    let mut best: Option<(f64, f64, SpaserState)> = None;
    let end = integrate_with(&start, params, opts.t_max, &opts.controls, |_, s| {
        steps += 1;
        if steps % opts.check_every.max(1) != 0 {
            return Flow::Continue;
        }
        let (r, nu) = phase_invariant_residual(params, s);
        best = Some((r, nu, *s));
        let plateau = r <= PLATEAU_RESIDUAL && r >= 0.99 * last;
        last = r;
        if r <= opts.tol || plateau {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    let (r, nu, state) = match best {
        Some(b) if end.stopped_early => b,
        _ => {
            let (r, nu) = phase_invariant_residual(params, &end.state);
            (r, nu, end.state)
        }
    };
    let state = state.rotate_phase(-state.amplitude.arg());
    let mut z = reduced_from(&state.rho, state.amplitude);
    z[AMP + 1] = 0.0;
    let (z, nu) = if r > opts.tol && r <= PLATEAU_RESIDUAL { polish(params, z, nu, opts.tol) } else { (z, nu) };
    Ok(finish(params, z, nu, opts.tol, SteadyMethod::OdeRelaxation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::closed_form::steady_inversions_closed_form;

    #[test]
    fn below_threshold_is_the_closed_form_background() {
        let p = ModelParams::default().with_pump(1e12);
        let r = steady_state_numeric(&p, BranchHint::Spasing, &SteadyOptions::default()).unwrap();
        assert_eq!(r.plasmon_number, 0.0);
        let cf = steady_inversions_closed_form(&p).unwrap();
        assert!((r.n21 - cf.n21_bar).abs() < 1e-14);
        assert!((r.n32 - cf.n32_bar).abs() < 1e-14);
        assert!(r.converged && r.stable);
    }

    #[test]
    fn unpumped_undriven_is_the_ground_state() {
        let p = ModelParams::default().with_pump(0.0).with_drive(0.0);
        let r = steady_state_numeric(&p, BranchHint::Spasing, &SteadyOptions::default()).unwrap();
        assert_eq!(r.plasmon_number, 0.0);
        for (got, want) in r.rho.populations.iter().zip([1.0, 0.0, 0.0]) {
            assert!((got - want).abs() <= 4.0 * f64::EPSILON, "{:?}", r.rho.populations);
        }
    }

    #[test]
    fn algebraic_spasing_state_is_a_converged_stable_fixed_point() {
        let p = ModelParams::default();
        let r = steady_state_algebraic(&p, &SteadyOptions::default()).unwrap();
        assert!(r.plasmon_number > 0.0);
        assert!(r.converged, "residual {}", r.residual_norm);
        assert!(r.stable);
        assert!((r.rho.trace() - 1.0).abs() < 1e-12);
        let n_bound = p.plasmon.n_p * p.gain.pump_g / (2.0 * p.plasmon.gamma_n);
        assert!(r.plasmon_number < n_bound);
    }

    #[test]
    fn relaxation_agrees_with_algebraic_root() {
        for (g, wa) in [(8e12, 16e12), (8e12, 0.0), (2e13, 4e12)] {
            let p = ModelParams::default().with_pump(g).with_drive(wa);
            let opts = SteadyOptions::default();
            let alg = steady_state_algebraic(&p, &opts).unwrap();
            let ode = steady_state_relaxation(&p, BranchHint::Spasing, &opts).unwrap();
            assert!(ode.converged, "g={g} wa={wa}: residual {}", ode.residual_norm);
            let rel = (alg.plasmon_number - ode.plasmon_number).abs() / alg.plasmon_number;
            assert!(rel < 1e-3, "g={g} wa={wa}: {} vs {}", alg.plasmon_number, ode.plasmon_number);
            assert!((alg.nu_s - ode.nu_s).abs() < 1e-6 * p.plasmon.gamma_n);
        }
    }

    #[test]
    fn zero_hint_returns_background_even_above_threshold() {
        let p = ModelParams::default();
        let r = steady_state_numeric(&p, BranchHint::Zero, &SteadyOptions::default()).unwrap();
        assert_eq!(r.plasmon_number, 0.0);
        assert!(!r.stable);
    }
}
