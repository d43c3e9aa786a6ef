//! Calibration of the single-plasmon Rabi frequency against a target ratio of
//! undriven to driven spasing thresholds.

use serde::{Deserialize, Serialize};

use crate::analysis::threshold::threshold_find_auto;
use crate::error::AnalysisError;
use crate::params::{ModelParams, DEFAULT_DRIVE};

const SCAN_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    /// Desired g_th(Ω_a = 0) / g_th(Ω_a = `drive`).
    pub threshold_ratio: f64,
    /// Drive Rabi frequency of the driven threshold, rad/s.
    pub drive: f64,
    /// Accepted relative deviation from `threshold_ratio`.
    pub rel_tol: f64,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self { threshold_ratio: 2.0, drive: DEFAULT_DRIVE, rel_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub omega_b_single: f64,
    pub ratio: f64,
    pub g_th_undriven: f64,
    pub g_th_driven: f64,
    /// (Ω̃_b, ratio) on the scan grid; NaN where a threshold is missing.
    pub curve: Vec<(f64, f64)>,
}

/// Threshold ratio at coupling `omega_b_single`, together with the two
/// thresholds. NaN when either threshold does not exist.
pub fn threshold_ratio(params: &ModelParams, omega_b_single: f64, drive: f64) -> Result<(f64, f64, f64), AnalysisError> {
    let p = params.with_coupling(omega_b_single);
    let g = |wa: f64| match threshold_find_auto(&p.with_drive(wa)) {
        Ok(t) => Ok(t.g_th),
        Err(AnalysisError::NoThreshold { .. }) => Ok(f64::NAN),
        Err(e) => Err(e),
    };
    let (g0, g1) = (g(0.0)?, g(drive)?);
    Ok((g0 / g1, g0, g1))
}

/// Ω̃_b in `bracket` at which the threshold ratio first reaches the target,
/// scanning upward on a logarithmic grid and bisecting the crossing.
pub fn calibrate_coupling(
    params: &ModelParams,
    targets: &CalibrationTargets,
    bracket: (f64, f64),
) -> Result<CalibrationResult, AnalysisError> {
    params.validate()?;
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(AnalysisError::Degenerate("coupling bracket must satisfy 0 < lo < hi"));
    }
    let target = targets.threshold_ratio;
    let step = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
    let mut curve = Vec::with_capacity(SCAN_POINTS);
    let mut crossing = None;
    for k in 0..SCAN_POINTS {
        let w = if k == SCAN_POINTS - 1 { hi } else { lo * (step * k as f64).exp() };
        let (ratio, _, _) = threshold_ratio(params, w, targets.drive)?;
        if let Some(&(w_prev, r_prev)) = curve.last() {
            let (r_prev, ratio): (f64, f64) = (r_prev, ratio);
            if crossing.is_none() && r_prev.is_finite() && ratio.is_finite() && (r_prev - target) * (ratio - target) <= 0.0 {
                crossing = Some((w_prev, r_prev, w, ratio));
            }
        }
        curve.push((w, ratio));
    }
    let Some((mut a, mut ra, mut b, _)) = crossing else {
        return Err(AnalysisError::CalibrationUnattainable { target, curve });
    };

    let mut best = (a, ra);
    for _ in 0..200 {
        let mid = (a * b).sqrt();
        let (r, _, _) = threshold_ratio(params, mid, targets.drive)?;
        if !r.is_finite() {
            return Err(AnalysisError::CalibrationUnattainable { target, curve });
        }
        if (r - target).abs() < (best.1 - target).abs() {
            best = (mid, r);
        }
        if (r - target).abs() <= targets.rel_tol * target || b / a - 1.0 < 1e-14 {
            break;
        }
        if (ra - target) * (r - target) <= 0.0 {
            b = mid;
        } else {
            a = mid;
            ra = r;
        }
    }
    let (ratio, g0, g1) = threshold_ratio(params, best.0, targets.drive)?;
    Ok(CalibrationResult { omega_b_single: best.0, ratio, g_th_undriven: g0, g_th_driven: g1, curve })
}
