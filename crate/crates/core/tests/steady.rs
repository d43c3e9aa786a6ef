//! Saturated steady states: time domain against the algebraic root, and the
//! population bookkeeping that must hold at every spasing point.

use num_complex::Complex64;
use proptest::prelude::*;
use spaser::analysis::{
    growth_rate, steady_state_algebraic, steady_state_numeric, steady_state_relaxation, BranchHint, SteadyOptions,
};
use spaser::{integrate, DensityMatrix3, IntegratorControls, ModelParams, SpaserState};

#[test]
fn uncoupled_plasmon_number_decays_at_twice_the_mode_rate() {
    let p = ModelParams::default().with_coupling(0.0);
    let s0 = SpaserState::new(DensityMatrix3::ground(), Complex64::new(1.0, 0.0));
    let controls = IntegratorControls { record_interval: 1e-16, ..IntegratorControls::with_tolerances(1e-10, 1e-14) };
    let tr = integrate(&s0, &p, 5.0 / p.plasmon.gamma_n, &controls).unwrap();
    for pt in &tr.points {
        let want = (-2.0 * p.plasmon.gamma_n * pt.t).exp();
        assert!((pt.plasmon_number - want).abs() <= 1e-8 * want.max(1e-6), "t={} {} vs {want}", pt.t, pt.plasmon_number);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn time_domain_saturation_matches_the_algebraic_root(
        g in 9e12f64..2e13,
        wa in prop::sample::select(vec![0.0, 4e12, 8e12, 16e12, 24e12]),
    ) {
        let p = ModelParams::default().with_pump(g).with_drive(wa).with_spasing_frame();
        let opts = SteadyOptions::default();
        let alg = steady_state_algebraic(&p, &opts).unwrap();
        prop_assume!(alg.stable);
        let ode = steady_state_relaxation(&p, BranchHint::Spasing, &opts).unwrap();
        prop_assert!(ode.converged);
        let rel = (alg.plasmon_number - ode.plasmon_number).abs() / alg.plasmon_number;
        prop_assert!(rel <= 1e-3, "{} vs {}", alg.plasmon_number, ode.plasmon_number);
    }
}

#[test]
fn excited_population_exceeds_ground_wherever_spasing_runs_without_inversion() {
    let base = ModelParams::default();
    let mut without_inversion = 0;
    for i in 1..=40 {
        let p = base.with_pump(5e11 * i as f64).with_spasing_frame();
        let r = steady_state_numeric(&p, BranchHint::Spasing, &SteadyOptions::default()).unwrap();
        if r.plasmon_number > 0.0 && r.n21 < 0.0 {
            without_inversion += 1;
            let o = r.observables();
            assert!(o.excited_minus_ground > 0.0, "g={:e}: ρ22+ρ33−ρ11 = {}", p.gain.pump_g, o.excited_minus_ground);
        }
    }
    assert!(without_inversion > 0);
}

#[test]
fn plasmon_number_does_not_decrease_with_pump() {
    for wa in [0.0, 4e12, 16e12, 24e12] {
        let base = ModelParams::default().with_drive(wa);
        let mut last = 0.0;
        for i in 1..=30 {
            let p = base.with_pump(1e12 * i as f64).with_spasing_frame();
            let r = steady_state_numeric(&p, BranchHint::Spasing, &SteadyOptions::default()).unwrap();
            assert!(r.converged);
            assert!(r.plasmon_number >= last, "Ωa={wa:e} g={:e}: {} < {last}", p.gain.pump_g, r.plasmon_number);
            if r.plasmon_number == 0.0 {
                assert!(growth_rate(&p).unwrap().gamma_s <= 0.0);
            }
            last = r.plasmon_number;
        }
    }
}
