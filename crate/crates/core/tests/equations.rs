//! The equations of motion against an independent commutator form, plus the
//! structural properties every right-hand side must have.

mod common;

use common::{arb_params, arb_state, rel_err};
use num_complex::Complex64;
use proptest::prelude::*;
use spaser::analysis::jacobian::{analytic_jacobian, expand, reduce, reduced_rhs, REDUCED_LEN};
use spaser::{equations_of_motion, Dynamics, ModelParams, SpaserState};

type M3 = [[Complex64; 3]; 3];

/// ρ̇ = −i[H, ρ] plus relaxation, built from the raw rates and a rotating
/// frame Hamiltonian with diagonal (0, Δ_b, Δ_b + Δ_a) and off-diagonal
/// couplings −Ω_b|2⟩⟨1|, −Ω_a|3⟩⟨2| and their conjugates.
fn commutator_rate(state: &SpaserState, p: &ModelParams) -> (M3, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let rho = state.rho.to_matrix();
    let wb = state.amplitude * p.plasmon.omega_b_single;
    let wa = re(p.drive.omega_a_rabi);
    let db = p.gain.omega21 - p.frame.nu_ref;
    let h: M3 = [
        [zero, -wb.conj(), zero],
        [-wb, re(db), -wa],
        [zero, -wa, re(db + p.drive.delta_a)],
    ];
    let mut out = [[zero; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut c = zero;
            for k in 0..3 {
                c += h[i][k] * rho[k][j] - rho[i][k] * h[k][j];
            }
            out[i][j] = -Complex64::i() * c;
        }
    }

    let g = &p.gain;
    let (r1, r2, r3) = (rho[0][0].re, rho[1][1].re, rho[2][2].re);
    out[0][0] += re(-g.pump_g * r1 + g.gamma21 * r2 + g.gamma31 * r3);
    out[1][1] += re(-g.gamma21 * r2 + g.gamma32 * r3);
    out[2][2] += re(g.pump_g * r1 - (g.gamma31 + g.gamma32) * r3);
    let w21 = 0.5 * (g.gamma21 + g.pump_g) + g.gamma_ph;
    let w31 = 0.5 * (g.gamma31 + g.gamma32 + g.pump_g) + g.gamma_ph;
    let w32 = 0.5 * (g.gamma31 + g.gamma21 + g.gamma32) + g.gamma_ph;
    for (i, j, w) in [(1, 0, w21), (2, 0, w31), (2, 1, w32)] {
        out[i][j] -= w * rho[i][j];
        out[j][i] -= w * rho[j][i];
    }

    let dn = p.plasmon.omega_n - p.frame.nu_ref;
    let da = -Complex64::new(p.plasmon.gamma_n, dn) * state.amplitude
        + Complex64::i() * (p.plasmon.n_p * p.plasmon.omega_b_single) * rho[1][0];
    (out, da)
}

fn scale(p: &ModelParams) -> f64 {
    Dynamics::new(p).rate_scale()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_commutator_form(state in arb_state(), p in arb_params()) {
        let rate = equations_of_motion(&state, &p).unwrap();
        let (m, da) = commutator_rate(&state, &p);
        let tol = 1e-12 * scale(&p) * (1.0 + state.amplitude.norm());
        for k in 0..3 {
            prop_assert!((rate.populations[k] - m[k][k].re).abs() <= tol);
            prop_assert!(m[k][k].im.abs() <= tol);
        }
        prop_assert!((rate.rho21 - m[1][0]).norm() <= tol);
        prop_assert!((rate.rho31 - m[2][0]).norm() <= tol);
        prop_assert!((rate.rho32 - m[2][1]).norm() <= tol);
        prop_assert!((rate.amplitude - da).norm() <= tol * p.plasmon.n_p);
    }

    #[test]
    fn trace_is_conserved(state in arb_state(), p in arb_params()) {
        let rate = equations_of_motion(&state, &p).unwrap();
        let tol = 1e-13 * scale(&p) * (1.0 + state.amplitude.norm());
        prop_assert!(rate.trace().abs() <= tol, "trace rate {}", rate.trace());
    }

    #[test]
    fn global_phase_rotates_the_rate(state in arb_state(), p in arb_params(), theta in -3.2f64..3.2) {
        let u = Complex64::from_polar(1.0, theta);
        let base = equations_of_motion(&state, &p).unwrap();
        let turned = equations_of_motion(&state.rotate_phase(theta), &p).unwrap();
        let tol = 1e-12 * scale(&p) * (1.0 + state.amplitude.norm()) * p.plasmon.n_p;
        for k in 0..3 {
            prop_assert!((turned.populations[k] - base.populations[k]).abs() <= tol);
        }
        prop_assert!((turned.rho21 - u * base.rho21).norm() <= tol);
        prop_assert!((turned.rho31 - u * base.rho31).norm() <= tol);
        prop_assert!((turned.rho32 - base.rho32).norm() <= tol);
        prop_assert!((turned.amplitude - u * base.amplitude).norm() <= tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_central_differences(state in arb_state(), p in arb_params()) {
        let d = Dynamics::new(&p);
        let z = reduce(&state);
        let j = analytic_jacobian(&d, &z);
        let jmax = j.abs().max();
        let mut worst = 0.0f64;
        for c in 0..REDUCED_LEN {
            let h = 1e-4 * z[c].abs().max(1.0);
            let (mut up, mut down) = (z, z);
            up[c] += h;
            down[c] -= h;
            let (fu, fd) = (reduced_rhs(&d, &up), reduced_rhs(&d, &down));
            for r in 0..REDUCED_LEN {
                let fdiff = (fu[r] - fd[r]) / (2.0 * h);
                worst = worst.max(rel_err(j[(r, c)], fdiff, 1e-6 * jmax));
            }
        }
        prop_assert!(worst <= 1e-6, "max relative deviation {worst:e}");
        prop_assert!(expand(&z).plasmon_number() == state.plasmon_number());
    }
}
