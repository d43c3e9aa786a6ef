//! Rotating-frame Maxwell–Bloch equations for one representative chromophore
//! coupled to the plasmon amplitude.
//!
//! With Ω_b = Ω̃_b·a₀ₙ and a real constant drive Ω_a:
//!
//! ```text
//! ρ̇₁₁ = −g ρ₁₁ + γ₂₁ρ₂₂ + γ₃₁ρ₃₃ + i(Ω_b*ρ₂₁ − Ω_b ρ₂₁*)
//! ρ̇₂₂ = −γ₂₁ρ₂₂ + γ₃₂ρ₃₃ − i(Ω_b*ρ₂₁ − Ω_b ρ₂₁*) + i(Ω_a ρ₃₂ − Ω_a ρ₃₂*)
//! ρ̇₃₃ = g ρ₁₁ − (γ₃₁+γ₃₂)ρ₃₃ − i(Ω_a ρ₃₂ − Ω_a ρ₃₂*)
//! ρ̇₂₁ = −Γ₂₁ρ₂₁ + iΩ_b(ρ₁₁−ρ₂₂) + iΩ_a ρ₃₁
//! ρ̇₃₁ = −Γ₃₁ρ₃₁ + iΩ_a ρ₂₁ − iΩ_b ρ₃₂
//! ρ̇₃₂ = −Γ₃₂ρ₃₂ + iΩ_a(ρ₂₂−ρ₃₃) − iΩ_b*ρ₃₁
//! ȧ₀ₙ = −Γ_n a₀ₙ + i N_p Ω̃_b ρ₂₁
//! ```

use num_complex::Complex64;

use crate::error::{ParamError, StateError};
use crate::params::ModelParams;
use crate::rates::{complex_rates, ComplexRates};
use crate::state::{SpaserState, StateRate, PACKED_LEN};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Trace tolerance accepted by [`equations_of_motion`].
pub const STATE_TOLERANCE: f64 = 1e-6;

/// Parameters flattened for repeated right-hand-side evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Dynamics {
    pub rates: ComplexRates,
    pub pump: f64,
    pub gamma21: f64,
    pub gamma31: f64,
    pub gamma32: f64,
    pub drive: f64,
    pub coupling: f64,
    pub n_p: f64,
}

impl Dynamics {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            rates: complex_rates(params),
            pump: params.gain.pump_g,
            gamma21: params.gain.gamma21,
            gamma31: params.gain.gamma31,
            gamma32: params.gain.gamma32,
            drive: params.drive.omega_a_rabi,
            coupling: params.plasmon.omega_b_single,
            n_p: params.plasmon.n_p,
        }
    }

    /// Largest rate magnitude in the problem; used to scale residuals and to
    /// pick step sizes.
    pub fn rate_scale(&self) -> f64 {
        [
            self.rates.gamma21.norm(),
            self.rates.gamma31.norm(),
            self.rates.gamma32.norm(),
            self.rates.gamma_n.norm(),
            self.pump,
            self.drive,
            self.coupling * self.n_p.sqrt(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Right-hand side on the packed layout of [`SpaserState::pack`].
    pub fn rhs(&self, x: &[f64; PACKED_LEN], dx: &mut [f64; PACKED_LEN]) {
        let (p1, p2, p3) = (x[0], x[1], x[2]);
        let r21 = Complex64::new(x[3], x[4]);
        let r31 = Complex64::new(x[5], x[6]);
        let r32 = Complex64::new(x[7], x[8]);
        let a = Complex64::new(x[9], x[10]);

        let wb = a * self.coupling;
        let wa = self.drive;

        // i(Ω_b*ρ₂₁ − Ω_b ρ₂₁*) = −2 Im(Ω_b*ρ₂₁)
        let flux_b = -2.0 * (wb.conj() * r21).im;
        // i(Ω_a ρ₃₂ − Ω_a ρ₃₂*) = −2 Ω_a Im ρ₃₂
        let flux_a = -2.0 * wa * r32.im;

        let d11 = -self.pump * p1 + self.gamma21 * p2 + self.gamma31 * p3 + flux_b;
        let d22 = -self.gamma21 * p2 + self.gamma32 * p3 - flux_b + flux_a;
        let d33 = self.pump * p1 - (self.gamma31 + self.gamma32) * p3 - flux_a;
        let d21 = -self.rates.gamma21 * r21 + I * wb * (p1 - p2) + I * wa * r31;
        let d31 = -self.rates.gamma31 * r31 + I * wa * r21 - I * wb * r32;
        let d32 = -self.rates.gamma32 * r32 + I * wa * (p2 - p3) - I * wb.conj() * r31;
        let da = -self.rates.gamma_n * a + I * (self.n_p * self.coupling) * r21;

        *dx = [d11, d22, d33, d21.re, d21.im, d31.re, d31.im, d32.re, d32.im, da.re, da.im];
    }
}

/// Checked time derivative of `state`.
pub fn equations_of_motion(
    state: &SpaserState,
    params: &ModelParams,
) -> Result<StateRate, EomError> {
    params.validate()?;
    state.rho.validate(STATE_TOLERANCE)?;
    if !(state.amplitude.re.is_finite() && state.amplitude.im.is_finite()) {
        return Err(StateError::NonFinite.into());
    }
    let mut dx = [0.0; PACKED_LEN];
    Dynamics::new(params).rhs(&state.pack(), &mut dx);
    Ok(StateRate::from_packed(&dx))
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum EomError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("invalid state: {0}")]
    State(#[from] StateError),
}
