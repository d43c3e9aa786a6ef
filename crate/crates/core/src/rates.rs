use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

/// Complex coherence decay rates in the rotating frame. The real parts are the
/// dephasing rates, the imaginary parts the frame detunings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRates {
    pub gamma21: Complex64,
    pub gamma31: Complex64,
    pub gamma32: Complex64,
    pub gamma_n: Complex64,
}

impl ComplexRates {
    /// Real parts (Γ̃₂₁, Γ̃₃₁, Γ̃₃₂).
    pub fn real_parts(&self) -> [f64; 3] {
        [self.gamma21.re, self.gamma31.re, self.gamma32.re]
    }
}

pub fn complex_rates(params: &ModelParams) -> ComplexRates {
    let g = &params.gain;
    let delta_a = params.drive.delta_a;
    let delta_b = params.delta_b();
    ComplexRates {
        gamma21: Complex64::new(0.5 * (g.gamma21 + g.pump_g) + g.gamma_ph, delta_b),
        gamma31: Complex64::new(
            0.5 * (g.gamma31 + g.gamma32 + g.pump_g) + g.gamma_ph,
            delta_a + delta_b,
        ),
        gamma32: Complex64::new(0.5 * (g.gamma31 + g.gamma21 + g.gamma32) + g.gamma_ph, delta_a),
        gamma_n: Complex64::new(params.plasmon.gamma_n, params.delta_n()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::*;

    fn bare() -> ModelParams {
        let mut p = ModelParams::default();
        p.gain = GainParams {
            gamma21: 0.0,
            gamma31: 0.0,
            gamma32: 0.0,
            gamma_ph: 0.0,
            pump_g: 0.0,
            omega21: 3.0e15,
            omega32: 3.0e14,
        };
        p.drive.delta_a = 0.0;
        p.in_frame(p.gain.omega21)
    }

    #[test]
    fn gamma21_direct() {
        let mut p = bare();
        p.gain.gamma21 = 2e12;
        p.gain.pump_g = 4e12;
        let r = complex_rates(&p);
        assert_eq!(r.gamma21, Complex64::new(3e12, 0.0));
    }

    #[test]
    fn gamma31_with_dephasing_and_detunings() {
        let mut p = bare();
        p.gain.gamma_ph = 5e12;
        p.drive.delta_a = 1e12;
        p = p.in_frame(p.gain.omega21 - 2e12);
        let r = complex_rates(&p);
        assert!((r.gamma31 - Complex64::new(5e12, 3e12)).norm() < 1e-3 * 1e12);
    }

    #[test]
    fn defaults_hand_evaluated() {
        // γ21 = 7.5e12, γ31 = 1e10, γ32 = 1.6e12, g = 8e12, γph = 0
        let p = ModelParams::default();
        let r = complex_rates(&p);
        assert_eq!(r.gamma21.re, 7.75e12);
        assert_eq!(r.gamma31.re, 4.805e12);
        assert_eq!(r.gamma32.re, 4.555e12);
        assert_eq!(r.gamma32.im, 0.0);
        assert_eq!(r.gamma_n.re, 5.3e14);
        assert_eq!(r.gamma21.im, p.delta_b());
        assert_eq!(r.gamma31.im, p.delta_b());
        assert_eq!(r.gamma_n.im, p.delta_n());
    }
}
