//! Drive-dressed steady state of the gain medium without plasmon feedback.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::params::ModelParams;
use crate::rates::complex_rates;
use crate::state::DensityMatrix3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormInversions {
    /// ρ₂₂ − ρ₁₁.
    pub n21_bar: f64,
    /// ρ₃₃ − ρ₂₂.
    pub n32_bar: f64,
    /// 𝓜, the common normalisation.
    pub m: f64,
}

pub(crate) fn require_resonant_drive(params: &ModelParams) -> Result<(), AnalysisError> {
    if params.drive.delta_a != 0.0 {
        return Err(AnalysisError::DetunedDrive(params.drive.delta_a));
    }
    Ok(())
}

/// Steady-state inversions for Ω_b → 0 and a resonant drive:
///
/// ```text
/// 𝓜⁻¹ = Γ₃₂[g(γ₂₁+γ₃₂) + γ₂₁(γ₃₁+γ₃₂)] + 2(2g+γ₂₁+γ₃₁)Ω_a²
/// n̄₂₁ = [(gγ₃₂ − γ₂₁γ₃₁ − γ₂₁γ₃₂)Γ₃₂ + 2(g−γ₂₁−γ₃₁)Ω_a²]·𝓜
/// n̄₃₂ = (γ₂₁−γ₃₂)·g·Γ₃₂·𝓜
/// ```
pub fn steady_inversions_closed_form(
    params: &ModelParams,
) -> Result<ClosedFormInversions, AnalysisError> {
    params.validate()?;
    require_resonant_drive(params)?;
    let gp = &params.gain;
    let (g, g21, g31, g32) = (gp.pump_g, gp.gamma21, gp.gamma31, gp.gamma32);
    let wa2 = params.drive.omega_a_rabi.powi(2);
    let big_g32 = complex_rates(params).gamma32.re;

    let m_inv = big_g32 * (g * (g21 + g32) + g21 * (g31 + g32)) + 2.0 * (2.0 * g + g21 + g31) * wa2;
    if !(m_inv > 0.0) {
        return Err(AnalysisError::Degenerate("all relaxation rates and the drive vanish"));
    }
    let m = 1.0 / m_inv;
    Ok(ClosedFormInversions {
        n21_bar: ((g * g32 - g21 * g31 - g21 * g32) * big_g32 + 2.0 * (g - g21 - g31) * wa2) * m,
        n32_bar: (g21 - g32) * g * big_g32 * m,
        m,
    })
}

/// Full background density matrix (a = 0) implied by the closed form,
/// including the drive coherence ρ₃₂ = −iΩ_a n̄₃₂/Γ₃₂.
pub fn background_state_closed_form(params: &ModelParams) -> Result<DensityMatrix3, AnalysisError> {
    let inv = steady_inversions_closed_form(params)?;
    // ρ₂₂ = ρ₁₁ + n̄₂₁, ρ₃₃ = ρ₂₂ + n̄₃₂, unit trace.
    let p1 = (1.0 - 2.0 * inv.n21_bar - inv.n32_bar) / 3.0;
    let p2 = p1 + inv.n21_bar;
    let p3 = p2 + inv.n32_bar;
    let big_g32 = complex_rates(params).gamma32.re;
    let rho32 = Complex64::new(0.0, -params.drive.omega_a_rabi * inv.n32_bar / big_g32);
    Ok(DensityMatrix3 {
        populations: [p1, p2, p3],
        rho21: Complex64::new(0.0, 0.0),
        rho31: Complex64::new(0.0, 0.0),
        rho32,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unpumped_undriven_sits_in_ground_state() {
        let p = ModelParams::default().with_pump(0.0).with_drive(0.0);
        let inv = steady_inversions_closed_form(&p).unwrap();
        assert!((inv.n21_bar + 1.0).abs() < 1e-15);
        assert_eq!(inv.n32_bar, 0.0);
        let rho = background_state_closed_form(&p).unwrap();
        assert!((rho.populations[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equal_lower_decays_cancel_upper_inversion() {
        let mut p = ModelParams::default();
        p.gain.gamma32 = p.gain.gamma21;
        for (g, wa) in [(1e12, 0.0), (8e12, 16e12), (3e13, 4e12)] {
            let inv = steady_inversions_closed_form(&p.with_pump(g).with_drive(wa)).unwrap();
            assert_eq!(inv.n32_bar, 0.0);
        }
    }

    #[test]
    fn degenerate_rates_are_an_error() {
        let mut p = ModelParams::default().with_pump(0.0).with_drive(0.0);
        p.gain.gamma21 = 0.0;
        p.gain.gamma31 = 0.0;
        p.gain.gamma32 = 0.0;
        assert!(matches!(steady_inversions_closed_form(&p), Err(AnalysisError::Degenerate(_))));
    }

    #[test]
    fn detuned_drive_is_rejected() {
        let mut p = ModelParams::default();
        p.drive.delta_a = 1e11;
        assert!(matches!(steady_inversions_closed_form(&p), Err(AnalysisError::DetunedDrive(_))));
    }
}
