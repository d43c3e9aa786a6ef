#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use spaser::{DensityMatrix3, ModelParams, SpaserState};

/// ρ = MM†/tr(MM†) from an arbitrary complex 3×3 matrix, so the result is a
/// valid density matrix.
pub fn density_from(m: &[f64; 18]) -> DensityMatrix3 {
    let c = |i: usize, j: usize| Complex64::new(m[2 * (3 * i + j)], m[2 * (3 * i + j) + 1]);
    let mut rho = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                rho[i][j] += c(i, k) * c(j, k).conj();
            }
        }
    }
    let tr = rho[0][0].re + rho[1][1].re + rho[2][2].re;
    DensityMatrix3 {
        populations: [rho[0][0].re / tr, rho[1][1].re / tr, rho[2][2].re / tr],
        rho21: rho[1][0] / tr,
        rho31: rho[2][0] / tr,
        rho32: rho[2][1] / tr,
    }
}

pub fn arb_state() -> impl Strategy<Value = SpaserState> {
    (prop::array::uniform18(-1.0f64..1.0), -30.0f64..30.0, -30.0f64..30.0)
        .prop_filter("non-degenerate matrix", |(m, _, _)| m.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|(m, re, im)| SpaserState::new(density_from(&m), Complex64::new(re, im)))
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

/// Parameters around the defaults: rates log-uniform over four decades,
/// detuned frame, any drive detuning.
pub fn arb_params() -> impl Strategy<Value = ModelParams> {
    (
        (log_uniform(1e10, 1e14), log_uniform(1e10, 1e14), log_uniform(1e10, 1e14), 0.0f64..1e14),
        (0.0f64..5e13, -5e12f64..5e12, 0.0f64..5e13, log_uniform(1e11, 1e14)),
        (-2e13f64..2e13, log_uniform(1e12, 1e15)),
    )
        .prop_map(|((g21, g31, g32, g), (wa, da, gph, wb), (shift, gn))| {
            let mut p = ModelParams::default();
            p.gain.gamma21 = g21;
            p.gain.gamma31 = g31;
            p.gain.gamma32 = g32;
            p.gain.pump_g = g;
            p.gain.gamma_ph = gph;
            p.drive.omega_a_rabi = wa;
            p.drive.delta_a = da;
            p.plasmon.omega_b_single = wb;
            p.plasmon.gamma_n = gn;
            p.in_frame(p.gain.omega21 + shift)
        })
}

/// Same as [`arb_params`] with a resonant drive, as the closed forms need.
pub fn arb_resonant_params() -> impl Strategy<Value = ModelParams> {
    arb_params().prop_map(|mut p| {
        p.drive.delta_a = 0.0;
        p
    })
}

pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
