//! Spasing frequency: the closed-form frequency-pulling estimate and its
//! refinement to an exact root of the imaginary part of the spasing
//! condition.

use crate::analysis::closed_form::{require_resonant_drive, steady_inversions_closed_form};
use crate::analysis::condition::spasing_condition_residual;
use crate::analysis::stability::growth_rate;
use crate::error::AnalysisError;
use crate::params::ModelParams;
use crate::rates::complex_rates;

pub const MAX_FREQUENCY_ITERATIONS: usize = 1000;
/// Target step for the refinement, rad/s. Absolute frequencies near 4×10¹⁵
/// rad/s have a spacing of 0.5 rad/s in f64, so the effective stopping rule
/// is the larger of this and a few ulps.
pub const FREQUENCY_TOLERANCE: f64 = 1e-3;

/// Weighted mean of ω₂₁ and ω_n:
///
/// ```text
/// ν_s = [αω₂₁ + (Γ̃₂₁Γ̃₃₁ + Ω_a²)ω_n] / [α + Γ̃₂₁Γ̃₃₁ + Ω_a²]
/// α   = [(N_pΩ̃_b²/(Γ₃₂Γ̃₃₁))n̄₃₂ − γ_n/Γ̃₃₁]Ω_a² + γ_nΓ̃₃₁
/// ```
///
/// Γ̃ are real parts of the coherence decay rates, which do not depend on the
/// frame, so no iteration is needed for this estimate.
pub fn spasing_frequency_formula(params: &ModelParams) -> Result<f64, AnalysisError> {
    require_resonant_drive(params)?;
    let inv = steady_inversions_closed_form(params)?;
    let r = complex_rates(params);
    let [g21, g31, g32] = r.real_parts();
    if g31 == 0.0 || g32 == 0.0 {
        return Err(AnalysisError::Degenerate("vanishing coherence decay rate"));
    }
    let wa2 = params.drive.omega_a_rabi.powi(2);
    let gamma_n = params.plasmon.gamma_n;
    let alpha = (params.collective_coupling_sq() / (g32 * g31) * inv.n32_bar - gamma_n / g31) * wa2
        + gamma_n * g31;
    let beta = g21 * g31 + wa2;
    let denom = alpha + beta;
    if denom == 0.0 || !denom.is_finite() {
        return Err(AnalysisError::Degenerate("frequency-pulling weights cancel"));
    }
    let (w21, wn) = (params.gain.omega21, params.plasmon.omega_n);
    // Offset form keeps the result exact when the two lines coincide.
    Ok(wn + alpha * (w21 - wn) / denom)
}

/// Frequency at which the imaginary part of the spasing condition vanishes.
///
/// Under strong drive the imaginary part has several roots (one per dressed
/// line), and the closed-form estimate can sit nearer the wrong one. The
/// search therefore starts from the oscillation frequency of the fastest
/// growing plasmon mode of the non-spasing state, which coincides with the
/// spasing frequency at threshold. Deep in the absorbing regime that mode
/// can be split far from any root, in which case the closed-form estimate
/// seeds the search instead. The nearest root is bracketed by an outward
/// scan and polished by Newton steps that fall back to bisection.
pub fn spasing_frequency(params: &ModelParams) -> Result<f64, AnalysisError> {
    require_resonant_drive(params)?;
    let seed = growth_rate(params)?.leading.frequency;
    match refine_frequency(params, seed) {
        Err(AnalysisError::FrequencyNotConverged { .. }) => refine_frequency(params, spasing_frequency_formula(params)?),
        other => other,
    }
}

/// Root of the imaginary part of the spasing condition nearest to `seed`.
pub fn refine_frequency(params: &ModelParams, seed: f64) -> Result<f64, AnalysisError> {
    let r = complex_rates(params);
    let width = r.gamma21.re + r.gamma31.re;
    let reach = width
        + params.drive.omega_a_rabi
        + (params.gain.omega21 - params.plasmon.omega_n).abs()
        + params.plasmon.gamma_n;
    nearest_root(|nu| spasing_condition_residual(params, nu).map(|z| z.im), seed, width, reach)
}

/// Root of `f` nearest to `seed`: an outward scan for a sign change up to
/// `4·reach` away, then Newton steps kept inside the bracket.
pub(crate) fn nearest_root<F>(mut f: F, seed: f64, width: f64, reach: f64) -> Result<f64, AnalysisError>
where
    F: FnMut(f64) -> Result<f64, AnalysisError>,
{
    let f_seed = f(seed)?;
    if f_seed == 0.0 {
        return Ok(seed);
    }
    let mut evaluations = 1;
    let (mut lo, mut hi, mut f_lo) = {
        let mut d = 1e-6 * width.max(1.0);
        loop {
            let (fm, fp) = (f(seed - d)?, f(seed + d)?);
            evaluations += 2;
            if fm.signum() != f_seed.signum() {
                break (seed - d, seed, fm);
            }
            if fp.signum() != f_seed.signum() {
                break (seed, seed + d, f_seed);
            }
            d *= 2.0;
            if d > 4.0 * reach || evaluations > MAX_FREQUENCY_ITERATIONS {
                return Err(AnalysisError::FrequencyNotConverged { iterations: evaluations });
            }
        }
    };

    let tolerance = |x: f64| FREQUENCY_TOLERANCE.max(4.0 * f64::EPSILON * x.abs());
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_FREQUENCY_ITERATIONS {
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= tolerance(x) {
            return Ok(0.5 * (lo + hi));
        }
        let dh = (1e-4 * (hi - lo)).max(tolerance(x));
        let slope = (f(x + dh)? - f(x - dh)?) / (2.0 * dh);
        let newton = x - fx / slope;
        let next = if slope.is_finite() && slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= tolerance(x) {
            return Ok(next);
        }
        x = next;
    }
    Err(AnalysisError::FrequencyNotConverged { iterations: MAX_FREQUENCY_ITERATIONS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_lines_give_that_line() {
        let mut p = ModelParams::default();
        p.plasmon.omega_n = p.gain.omega21;
        assert_eq!(spasing_frequency_formula(&p).unwrap(), p.gain.omega21);
        let nu = spasing_frequency(&p).unwrap();
        assert!((nu - p.gain.omega21).abs() <= 2.0, "{}", nu - p.gain.omega21);
    }

    #[test]
    fn drive_free_formula_is_linewidth_weighted_mean() {
        let p = ModelParams::default().with_drive(0.0);
        let g21 = complex_rates(&p).gamma21.re;
        let gn = p.plasmon.gamma_n;
        let expected = (gn * p.gain.omega21 + g21 * p.plasmon.omega_n) / (gn + g21);
        let got = spasing_frequency_formula(&p).unwrap();
        assert!((got - expected).abs() <= 4.0 * f64::EPSILON * expected, "{got} {expected}");
    }

    #[test]
    fn driven_defaults_are_pulled_between_the_lines() {
        let p = ModelParams::default();
        let nu = spasing_frequency(&p).unwrap();
        let (lo, hi) = (p.plasmon.omega_n, p.gain.omega21);
        assert!(nu > lo && nu < hi, "{nu} not in ({lo}, {hi})");
    }

    #[test]
    fn refined_frequency_zeroes_imaginary_residual() {
        for wa in [0.0, 4e12, 16e12, 24e12] {
            let p = ModelParams::default().with_drive(wa);
            let nu = spasing_frequency(&p).unwrap();
            let r = spasing_condition_residual(&p, nu).unwrap();
            assert!(r.im.abs() <= 1e-9, "wa={wa}: {}", r.im);
        }
    }
}
