use num_complex::Complex64;

use crate::analysis::closed_form::steady_inversions_closed_form;
use crate::error::AnalysisError;
use crate::params::ModelParams;
use crate::rates::complex_rates;

/// Left-hand side minus one of the linear spasing condition,
///
/// ```text
/// N_pΩ̃_b²/(Γ_nΓ₂₁)·(n̄₂₁ + Ω_a²n̄₃₂/(Γ₃₁Γ₃₂)) − Ω_a²/(Γ₂₁Γ₃₁) − 1,
/// ```
///
/// with all complex rates evaluated in the frame rotating at `nu_s`. A zero
/// marks the onset of a steady spasing solution at that frequency; a positive
/// real part means net gain.
pub fn spasing_condition_residual(params: &ModelParams, nu_s: f64) -> Result<Complex64, AnalysisError> {
    let framed = params.in_frame(nu_s);
    let inv = steady_inversions_closed_form(&framed)?;
    let r = complex_rates(&framed);
    if [r.gamma21, r.gamma31, r.gamma32, r.gamma_n].iter().any(|z| z.norm() == 0.0) {
        return Err(AnalysisError::Degenerate("a complex relaxation rate vanishes"));
    }
    let wa2 = params.drive.omega_a_rabi.powi(2);
    let dressed = inv.n21_bar + wa2 * inv.n32_bar / (r.gamma31 * r.gamma32);
    Ok(framed.collective_coupling_sq() / (r.gamma_n * r.gamma21) * dressed
        - wa2 / (r.gamma21 * r.gamma31)
        - 1.0)
}
