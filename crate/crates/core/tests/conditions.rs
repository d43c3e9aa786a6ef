//! Onset conditions against independent oracles: a two-level spasing
//! condition coded from scratch, time integration for the drive-dressed
//! inversions, and the growth rate for the sign of the residual.

mod common;

use common::{arb_resonant_params, rel_err};
use num_complex::Complex64;
use proptest::prelude::*;
use spaser::analysis::{
    growth_rate, spasing_condition_residual, spasing_frequency, steady_inversions_closed_form, threshold_find_auto,
};
use spaser::{integrate_with, Flow, IntegratorControls, ModelParams, SpaserState};

/// Two-level condition N_pΩ̃_b² n₂₁/(Γ_nΓ₂₁) − 1 with n₂₁ taken from the
/// undriven rate equations: ρ₃₃ = gρ₁₁/(γ₃₁+γ₃₂), ρ₂₂ = γ₃₂ρ₃₃/γ₂₁.
fn two_level_residual(p: &ModelParams, nu: f64) -> Complex64 {
    let g = &p.gain;
    let r33 = g.pump_g / (g.gamma31 + g.gamma32);
    let r22 = g.gamma32 * r33 / g.gamma21;
    let n21 = (r22 - 1.0) / (1.0 + r22 + r33);
    let gamma21 = Complex64::new(0.5 * (g.gamma21 + g.pump_g) + g.gamma_ph, g.omega21 - nu);
    let gamma_n = Complex64::new(p.plasmon.gamma_n, p.plasmon.omega_n - nu);
    let coupling = p.plasmon.n_p * p.plasmon.omega_b_single.powi(2);
    coupling * n21 / (gamma_n * gamma21) - 1.0
}

#[test]
fn undriven_condition_is_the_two_level_condition() {
    let base = ModelParams::default().with_drive(0.0);
    for g in [2e12, 8e12, 3e13] {
        let mut p = base.with_pump(g);
        p.gain.gamma32 = 100.0 * g;
        for nu in [p.plasmon.omega_n, p.gain.omega21, p.plasmon.omega_n - 1e13] {
            let got = spasing_condition_residual(&p, nu).unwrap();
            let want = two_level_residual(&p, nu);
            assert!((got - want).norm() <= 1e-12 * want.norm(), "g={g} nu={nu}: {got} vs {want}");
        }
    }
}

#[test]
fn fast_upper_decay_recovers_the_textbook_two_level_inversion() {
    let mut p = ModelParams::default().with_drive(0.0).with_pump(6e12);
    p.gain.gamma31 = 0.0;
    p.gain.gamma32 = 1e6 * p.gain.pump_g;
    let inv = steady_inversions_closed_form(&p).unwrap();
    let (g, g21) = (p.gain.pump_g, p.gain.gamma21);
    assert!((inv.n21_bar - (g - g21) / (g + g21)).abs() < 1e-5);
}

/// Integrates an uncoupled gain medium from the ground state until the
/// populations stop moving on the scale of the slowest population mode.
fn relaxed_inversions(p: &ModelParams) -> (f64, f64) {
    let g = &p.gain;
    let trace = g.pump_g + g.gamma21 + g.gamma31 + g.gamma32;
    let det = g.pump_g * (g.gamma21 + g.gamma32) + g.gamma21 * (g.gamma31 + g.gamma32);
    let slowest = det / trace;
    let controls = IntegratorControls {
        rel_tol: 1e-11,
        abs_tol: 1e-13,
        max_step: Some(f64::INFINITY),
        ..IntegratorControls::default()
    };
    let end = integrate_with(&SpaserState::seeded_ground(0.0), p, 60.0 / slowest, &controls, |_, _| Flow::Continue)
        .unwrap();
    let [r1, r2, r3] = end.state.rho.populations;
    (r2 - r1, r3 - r2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_form_inversions_are_the_long_time_limit(p in arb_resonant_params()) {
        let p = p.with_coupling(0.0);
        let cf = steady_inversions_closed_form(&p).unwrap();
        let (n21, n32) = relaxed_inversions(&p);
        prop_assert!(rel_err(n21, cf.n21_bar, 1e-3) <= 1e-6, "n21 {n21} vs {}", cf.n21_bar);
        prop_assert!(rel_err(n32, cf.n32_bar, 1e-3) <= 1e-6, "n32 {n32} vs {}", cf.n32_bar);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_and_growth_rate_agree_on_the_side_of_threshold(
        g in 1e11f64..3e13,
        wa in 0.0f64..3e13,
        gph in 0.0f64..1e14,
    ) {
        let p = ModelParams::default().with_pump(g).with_drive(wa).with_dephasing(gph);
        let s = growth_rate(&p).unwrap();
        // Within a hair of onset both signs are noise.
        prop_assume!(s.gamma_s.abs() > 1e-6 * p.plasmon.gamma_n);
        let nu = spasing_frequency(&p).unwrap();
        let re = spasing_condition_residual(&p, nu).unwrap().re;
        prop_assert_eq!(re > 0.0, s.gamma_s > 0.0, "residual {} γs {}", re, s.gamma_s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn threshold_depends_on_count_and_coupling_only_through_their_combination(
        k in 0.25f64..4.0,
        wa in prop::sample::select(vec![0.0, 4e12, 16e12]),
    ) {
        let p = ModelParams::default().with_drive(wa);
        let mut q = p;
        q.plasmon.n_p *= k;
        q.plasmon.omega_b_single /= k.sqrt();
        let a = threshold_find_auto(&p).unwrap().g_th;
        let b = threshold_find_auto(&q).unwrap().g_th;
        prop_assert!(rel_err(a, b, 0.0) <= 1e-9, "{a} vs {b}");
    }
}
