//! Pump threshold of spasing.
//!
//! Two estimators are computed: the root in g of the real part of the
//! spasing condition (evaluated at the spasing frequency), and the pump at
//! which the plasmon growth rate of the non-spasing state changes sign.

use serde::{Deserialize, Serialize};

use crate::analysis::condition::spasing_condition_residual;
use crate::analysis::frequency::spasing_frequency;
use crate::analysis::stability::growth_rate;
use crate::error::AnalysisError;
use crate::params::ModelParams;
use num_complex::Complex64;

/// Relative bracket width at which bisection stops.
pub const THRESHOLD_REL_TOL: f64 = 1e-12;
/// Largest relative disagreement accepted between the two estimators.
pub const ESTIMATOR_AGREEMENT: f64 = 0.01;
/// Default pump range scanned by [`threshold_find_auto`], s⁻¹.
pub const AUTO_PUMP_RANGE: (f64, f64) = (1e9, 1e15);
const AUTO_SCAN_POINTS: usize = 121;
/// Sub-grid used to isolate the lowest crossing inside a bracket. Above onset
/// the criteria need not stay positive, so a bare bisection over a wide
/// bracket could settle on a later crossing.
const BRACKET_SCAN_POINTS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Threshold pump from the spasing condition, s⁻¹.
    pub g_th: f64,
    /// Spasing frequency at `g_th`, rad/s.
    pub nu_s: f64,
    /// Spasing-condition residual at (`g_th`, `nu_s`).
    pub residual: Complex64,
    /// Threshold pump from the growth-rate sign change, when the growth rate
    /// changes sign in the same bracket.
    pub g_th_growth: Option<f64>,
    pub relative_disagreement: f64,
    pub agrees: bool,
}

/// Re of the spasing condition at pump `g`, evaluated at the spasing
/// frequency for that pump. Positive means net gain.
pub fn threshold_criterion(params: &ModelParams, g: f64) -> Result<f64, AnalysisError> {
    let p = params.with_pump(g);
    let nu = spasing_frequency(&p)?;
    Ok(spasing_condition_residual(&p, nu)?.re)
}

/// Lowest threshold pump inside `bracket`, s⁻¹.
pub fn threshold_find(params: &ModelParams, bracket: (f64, f64)) -> Result<ThresholdResult, AnalysisError> {
    params.validate()?;
    let (lo, hi) = bracket;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(AnalysisError::Degenerate("pump bracket must satisfy 0 <= lo < hi"));
    }
    let g_th = lowest_crossing(lo, hi, |g| threshold_criterion(params, g))?;
    let at = params.with_pump(g_th);
    let nu_s = spasing_frequency(&at)?;
    let residual = spasing_condition_residual(&at, nu_s)?;

    let g_th_growth = match lowest_crossing(lo, hi, |g| Ok(growth_rate(&params.with_pump(g))?.gamma_s)) {
        Ok(g) => Some(g),
        Err(AnalysisError::NoThreshold { .. }) => None,
        Err(e) => return Err(e),
    };
    let relative_disagreement = g_th_growth.map_or(f64::INFINITY, |g| (g - g_th).abs() / g_th);
    let agrees = relative_disagreement <= ESTIMATOR_AGREEMENT;
    if !agrees {
        log::warn!(
            "threshold estimators disagree: condition {g_th:.6e}, growth rate {:?} (relative {relative_disagreement:.3e})",
            g_th_growth
        );
    }
    Ok(ThresholdResult { g_th, nu_s, residual, g_th_growth, relative_disagreement, agrees })
}

/// First interval of a logarithmic pump grid where the plasmon growth rate
/// of the non-spasing state turns from negative to positive.
pub fn threshold_bracket(params: &ModelParams, range: (f64, f64), points: usize) -> Result<(f64, f64), AnalysisError> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(AnalysisError::Degenerate("scan range must satisfy 0 < lo < hi with >= 2 points"));
    }
    let rate = |g: f64| growth_rate(&params.with_pump(g)).map(|s| s.gamma_s);
    let step = (hi / lo).ln() / (points - 1) as f64;
    let grid = |k: usize| if k == points - 1 { hi } else { lo * (step * k as f64).exp() };
    let first = rate(lo)?;
    let mut prev = (lo, first);
    for k in 1..points {
        let g = grid(k);
        let r = rate(g)?;
        if prev.1 <= 0.0 && r > 0.0 {
            return Ok((prev.0, g));
        }
        prev = (g, r);
    }
    Err(AnalysisError::NoThreshold { lo, hi, residual_lo: first, residual_hi: prev.1 })
}

/// [`threshold_find`] over a bracket located by [`threshold_bracket`] on
/// [`AUTO_PUMP_RANGE`].
pub fn threshold_find_auto(params: &ModelParams) -> Result<ThresholdResult, AnalysisError> {
    let bracket = threshold_bracket(params, AUTO_PUMP_RANGE, AUTO_SCAN_POINTS)?;
    threshold_find(params, bracket)
}

/// Bisects the first loss-to-gain crossing found on a sub-grid of
/// [lo, hi], geometric when lo > 0.
fn lowest_crossing<F>(lo: f64, hi: f64, mut f: F) -> Result<f64, AnalysisError>
where
    F: FnMut(f64) -> Result<f64, AnalysisError>,
{
    let n = BRACKET_SCAN_POINTS;
    let node = |k: usize| match k {
        0 => lo,
        k if k == n => hi,
        k if lo > 0.0 => lo * (hi / lo).powf(k as f64 / n as f64),
        k => lo + (hi - lo) * k as f64 / n as f64,
    };
    let f_lo = f(lo)?;
    let mut prev = (lo, f_lo);
    for k in 1..=n {
        let g = node(k);
        let v = f(g)?;
        if prev.1 <= 0.0 && v > 0.0 {
            return bisect(prev.0, g, &mut f);
        }
        prev = (g, v);
    }
    // No upward crossing: fall back to any sign change so that a bracket
    // given in reverse orientation still resolves.
    bisect(lo, hi, &mut f).map_err(|e| match e {
        AnalysisError::NoThreshold { .. } => AnalysisError::NoThreshold { lo, hi, residual_lo: f_lo, residual_hi: prev.1 },
        e => e,
    })
}

fn bisect<F>(mut lo: f64, mut hi: f64, mut f: F) -> Result<f64, AnalysisError>
where
    F: FnMut(f64) -> Result<f64, AnalysisError>,
{
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(AnalysisError::NoThreshold { lo, hi, residual_lo: flo, residual_hi: fhi });
    }
    let rising = fhi > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= THRESHOLD_REL_TOL * mid.abs() || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_emitters_have_no_threshold() {
        let p = ModelParams::default().with_coupling(0.0);
        match threshold_find(&p, (1e10, 1e14)) {
            Err(AnalysisError::NoThreshold { residual_lo, residual_hi, .. }) => {
                assert!(residual_lo < 0.0 && residual_hi < 0.0);
            }
            other => panic!("expected NoThreshold, got {other:?}"),
        }
        assert!(matches!(threshold_find_auto(&p), Err(AnalysisError::NoThreshold { .. })));
    }

    #[test]
    fn estimators_agree_and_residual_vanishes() {
        for wa in [0.0, 4e12, 16e12] {
            let p = ModelParams::default().with_drive(wa);
            let t = threshold_find_auto(&p).unwrap();
            assert!(t.agrees, "wa={wa}: {t:?}");
            assert!(t.residual.norm() <= 1e-9, "wa={wa}: {:?}", t.residual);
            assert!(t.relative_disagreement < 1e-6, "wa={wa}: {}", t.relative_disagreement);
        }
    }

    #[test]
    fn threshold_sits_where_growth_rate_vanishes() {
        let p = ModelParams::default();
        let t = threshold_find_auto(&p).unwrap();
        assert!(growth_rate(&p.with_pump(t.g_th * 0.99)).unwrap().gamma_s < 0.0);
        assert!(growth_rate(&p.with_pump(t.g_th * 1.01)).unwrap().gamma_s > 0.0);
    }

    #[test]
    fn inverted_bracket_is_rejected() {
        assert!(threshold_find(&ModelParams::default(), (5e12, 1e12)).is_err());
    }
}
