//! Asymptotic plasmon numbers near threshold.
//!
//! Both formulas are leading-order expansions in g − γ₂₁ for the orderings
//! γ₃₁ ≪ γ₃₂ ≪ γ₂₁. Outside their regime they are only rough guides, so a
//! violated ordering is logged instead of rejected.

use crate::params::ModelParams;

/// Separation treated as "much larger than".
const REGIME_FACTOR: f64 = 10.0;

fn much_less(small: f64, large: f64) -> bool {
    REGIME_FACTOR * small <= large
}

fn warn_decay_ordering(params: &ModelParams) {
    let g = &params.gain;
    if !(much_less(g.gamma31, g.gamma32) && much_less(g.gamma32, g.gamma21)) {
        log::warn!(
            "limit formula used outside γ31 ≪ γ32 ≪ γ21 (γ31 = {:e}, γ32 = {:e}, γ21 = {:e})",
            g.gamma31,
            g.gamma32,
            g.gamma21
        );
    }
}

fn excess_pump(params: &ModelParams) -> f64 {
    (params.gain.pump_g - params.gain.gamma21).max(0.0)
}

/// N_n ≈ N_p(g − γ₂₁)/(6γ_n) for a drive much stronger than γ₂₁ and γ_n.
pub fn limit_strong_drive(params: &ModelParams) -> f64 {
    warn_decay_ordering(params);
    let wa = params.drive.omega_a_rabi;
    if !(much_less(params.gain.gamma21, wa) && much_less(params.plasmon.gamma_n, wa)) {
        log::warn!("strong-drive limit used with Ω_a = {wa:e} not ≫ γ21, γn");
    }
    if params.gain.pump_g <= params.gain.gamma21 {
        log::warn!("strong-drive limit used at or below g = γ21");
    }
    params.plasmon.n_p * excess_pump(params) / (6.0 * params.plasmon.gamma_n)
}

/// N_n ≈ N_pγ₃₂(g − γ₂₁)/(2γ_nγ₂₁) for a drive much weaker than γ₂₁ and γ_n.
pub fn limit_weak_drive(params: &ModelParams) -> f64 {
    warn_decay_ordering(params);
    let wa = params.drive.omega_a_rabi;
    if !(much_less(wa, params.gain.gamma21) && much_less(wa, params.plasmon.gamma_n)) {
        log::warn!("weak-drive limit used with Ω_a = {wa:e} not ≪ γ21, γn");
    }
    let g = &params.gain;
    params.plasmon.n_p * g.gamma32 * excess_pump(params) / (2.0 * params.plasmon.gamma_n * g.gamma21)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_limits_vanish_at_and_below_the_decay_rate() {
        let p = ModelParams::default();
        for g in [p.gain.gamma21, 0.5 * p.gain.gamma21, 0.0] {
            let q = p.with_pump(g);
            assert_eq!(limit_strong_drive(&q), 0.0);
            assert_eq!(limit_weak_drive(&q), 0.0);
        }
    }

    #[test]
    fn strong_drive_hand_value() {
        let mut p = ModelParams::default();
        p.plasmon.n_p = 6e4;
        p.plasmon.gamma_n = 5.3e14;
        let p = p.with_pump(p.gain.gamma21 + 1e12);
        let n = limit_strong_drive(&p);
        assert!((n - 6e4 * 1e12 / (6.0 * 5.3e14)).abs() <= 1e-12 * n);
        assert!((n - 18.87).abs() < 0.01, "{n}");
    }

    #[test]
    fn slope_ratio_is_three_gamma32_over_gamma21() {
        let p = ModelParams::default();
        let q = p.with_pump(1.3 * p.gain.gamma21);
        let ratio = limit_weak_drive(&q) / limit_strong_drive(&q);
        let expected = 3.0 * p.gain.gamma32 / p.gain.gamma21;
        assert!((ratio - expected).abs() <= 1e-12 * expected);
        assert!(ratio < 1.0);
    }
}
