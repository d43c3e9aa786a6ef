//! Linear stability of the non-spasing fixed point (a = 0).
//!
//! The fixed point does not depend on time in the rotating frame, so its
//! Floquet exponents are plain Jacobian eigenvalues. With perturbations
//! growing as e^{λt}, the plasmon growth rate is Re λ, and a mode with
//! eigenvalue λ oscillates in the laboratory at ν_ref − Im λ.

use nalgebra::{SMatrix, SVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::closed_form::background_state_closed_form;
use crate::analysis::jacobian::{analytic_jacobian, expand, reduced_from, reduced_rhs, Reduced, ReducedJacobian, AMP, REDUCED_LEN};
use crate::dynamics::Dynamics;
use crate::error::AnalysisError;
use crate::params::ModelParams;
use crate::state::DensityMatrix3;

const RHO_LEN: usize = AMP;
/// Eigenvectors whose plasmon share (in √N_p-balanced coordinates) is below
/// this are treated as pure gain-medium modes.
const AMPLITUDE_WEIGHT_FLOOR: f64 = 1e-8;

type CMatrix = SMatrix<Complex64, REDUCED_LEN, REDUCED_LEN>;
type CVector = SVector<Complex64, REDUCED_LEN>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub eigenvalue: Complex64,
    /// Fraction of the eigenvector norm carried by the plasmon amplitude.
    pub amplitude_weight: f64,
    /// Laboratory oscillation frequency ν_ref − Im λ, rad/s.
    pub frequency: f64,
    /// The real-ified system carries every complex mode twice, once as
    /// itself and once conjugated. This is set for the first kind, whose
    /// amplitude eigenvector satisfies Im a = −i Re a.
    pub direct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    /// Full spectrum, sorted by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    /// Largest Re λ among modes with a plasmon component, rad/s.
    pub gamma_s: f64,
    pub gamma_s_over_gamma_n: f64,
    /// The mode that sets `gamma_s`.
    pub leading: Mode,
    /// The fixed point that was linearised.
    pub background: DensityMatrix3,
}

/// Gain-medium fixed point with no plasmon field.
///
/// Uses the closed form for a resonant drive and a direct linear solve
/// otherwise (with a = 0 the equations are affine in ρ).
pub fn background_state(params: &ModelParams) -> Result<DensityMatrix3, AnalysisError> {
    params.validate()?;
    if params.drive.delta_a == 0.0 {
        return background_state_closed_form(params);
    }
    let d = Dynamics::new(params);
    let zero: Reduced = [0.0; REDUCED_LEN];
    let j = analytic_jacobian(&d, &zero);
    let f0 = reduced_rhs(&d, &zero);
    let a = j.fixed_view::<RHO_LEN, RHO_LEN>(0, 0).into_owned();
    let b = -SVector::<f64, RHO_LEN>::from_fn(|i, _| f0[i]);
    let z = a.lu().solve(&b).ok_or(AnalysisError::Degenerate("singular gain-medium relaxation matrix"))?;
    let mut full = zero;
    full[..RHO_LEN].copy_from_slice(z.as_slice());
    Ok(expand(&full).rho)
}

/// Jacobian spectrum at the a = 0 fixed point and the plasmon growth rate.
pub fn growth_rate(params: &ModelParams) -> Result<StabilityResult, AnalysisError> {
    let background = background_state(params)?;
    let d = Dynamics::new(params);
    let z = reduced_from(&background, Complex64::new(0.0, 0.0));
    let j = balance(analytic_jacobian(&d, &z), params.plasmon.n_p);
    let modes = modes(&j, params.frame.nu_ref)?;

    let mut eigenvalues: Vec<Complex64> = modes.iter().map(|m| m.eigenvalue).collect();
    sort_spectrum(&mut eigenvalues);

    let plasmonic: Vec<&Mode> = modes.iter().filter(|m| m.amplitude_weight > AMPLITUDE_WEIGHT_FLOOR).collect();
    let gamma_s = plasmonic
        .iter()
        .map(|m| m.eigenvalue.re)
        .max_by(f64::total_cmp)
        .ok_or(AnalysisError::Eigen("no eigenvector carries a plasmon component"))?;
    // Among modes sharing the top growth rate prefer the direct copy.
    let tie = 1e-9 * j.amax().max(1.0);
    let leading = plasmonic
        .iter()
        .filter(|m| m.eigenvalue.re >= gamma_s - tie)
        .max_by(|a, b| a.direct.cmp(&b.direct).then(a.amplitude_weight.total_cmp(&b.amplitude_weight)))
        .map(|m| (*m).clone())
        .expect("nonempty by construction");
    Ok(StabilityResult {
        eigenvalues,
        gamma_s,
        gamma_s_over_gamma_n: gamma_s / params.plasmon.gamma_n,
        leading,
        background,
    })
}

/// Rescales the amplitude coordinates by 1/√N_p. A similarity transform, so
/// the spectrum is unchanged, but the coupling entries become comparable.
pub(crate) fn balance(mut j: ReducedJacobian, n_p: f64) -> ReducedJacobian {
    let s = n_p.sqrt();
    for k in AMP..REDUCED_LEN {
        for c in 0..REDUCED_LEN {
            j[(k, c)] /= s;
            j[(c, k)] *= s;
        }
    }
    j
}

pub(crate) fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Eigenvalues of a real 10×10 matrix via real Schur form.
pub(crate) fn spectrum(j: &ReducedJacobian) -> Result<Vec<Complex64>, AnalysisError> {
    let schur = Schur::try_new(*j, f64::EPSILON, 100_000).ok_or(AnalysisError::Eigen("Schur iteration did not converge"))?;
    let ev = schur.complex_eigenvalues();
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(AnalysisError::Eigen("non-finite eigenvalue"));
    }
    Ok(ev.iter().copied().collect())
}

fn modes(j: &ReducedJacobian, nu_ref: f64) -> Result<Vec<Mode>, AnalysisError> {
    let eigenvalues = spectrum(j)?;
    let cj: CMatrix = j.map(|x| Complex64::new(x, 0.0));
    let scale = j.amax().max(1.0);
    Ok(eigenvalues
        .into_iter()
        .map(|lambda| {
            let v = eigenvector(&cj, lambda, scale);
            let total = v.norm_squared();
            let amp = v[AMP].norm_sqr() + v[AMP + 1].norm_sqr();
            let amplitude_weight = if total > 0.0 { amp / total } else { 0.0 };
            let (x, y) = (v[AMP], v[AMP + 1]);
            let i = Complex64::i();
            let direct = (x + i * y).norm() >= (x - i * y).norm();
            Mode { eigenvalue: lambda, amplitude_weight, frequency: nu_ref - lambda.im, direct }
        })
        .collect())
}

/// Inverse iteration with a slightly perturbed shift.
fn eigenvector(j: &CMatrix, lambda: Complex64, scale: f64) -> CVector {
    let shift = lambda + Complex64::new(1.0, 0.7) * (1e-10 * scale);
    let a = j - CMatrix::from_diagonal_element(shift);
    let lu = a.lu();
    let mut v = CVector::from_fn(|i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64));
    for _ in 0..4 {
        match lu.solve(&v) {
            Some(w) if w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                let n = w.norm();
                if n == 0.0 {
                    break;
                }
                v = w / Complex64::new(n, 0.0);
            }
            _ => break,
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    #[test]
    fn uncoupled_plasmon_decays_at_its_linewidth() {
        for wa in [0.0, 16e12] {
            let p = ModelParams::default().with_coupling(0.0).with_drive(wa);
            let s = growth_rate(&p).unwrap();
            assert!((s.gamma_s_over_gamma_n + 1.0).abs() < 1e-12, "{}", s.gamma_s_over_gamma_n);
            assert!((s.leading.frequency - p.plasmon.omega_n).abs() < 1e-3 * p.plasmon.gamma_n);
        }
    }

    #[test]
    fn spectrum_has_ten_entries_sorted() {
        let s = growth_rate(&ModelParams::default()).unwrap();
        assert_eq!(s.eigenvalues.len(), REDUCED_LEN);
        assert!(s.eigenvalues.windows(2).all(|w| w[0].re >= w[1].re));
    }

    #[test]
    fn growth_rate_matches_coherence_block_spectrum() {
        // At a = 0 the (ρ₂₁, ρ₃₁, a) perturbations obey a closed complex-linear
        // system; with a drive every one of its modes reaches the plasmon.
        for (g, wa) in [(8e12, 16e12), (2e12, 3e12), (6e12, 4e12), (1.5e13, 24e12)] {
            let p = ModelParams::default().with_pump(g).with_drive(wa);
            let bg = background_state(&p).unwrap();
            let r = crate::rates::complex_rates(&p);
            let w = p.plasmon.omega_b_single;
            let i = Complex64::i();
            let n21 = Complex64::new(bg.populations[0] - bg.populations[1], 0.0);
            let m = Matrix3::new(
                -r.gamma21, i * wa, i * w * n21,
                i * wa, -r.gamma31, -i * w * bg.rho32,
                i * p.plasmon.n_p * w, Complex64::new(0.0, 0.0), -r.gamma_n,
            );
            let ev = m.eigenvalues().unwrap_or_else(|| {
                nalgebra::Schur::new(m).eigenvalues().unwrap()
            });
            let best = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let s = growth_rate(&p).unwrap();
            assert!((s.gamma_s - best).abs() <= 1e-9 * p.plasmon.gamma_n, "g={g} wa={wa}: {} vs {best}", s.gamma_s);
        }
    }

    #[test]
    fn undriven_growth_rate_solves_the_coupled_oscillator_quadratic() {
        // (λ + Γ₂₁)(λ + Γ_n) = N_pΩ̃_b²(ρ₂₂ − ρ₁₁)
        for g in [1e12, 3e12, 5e12, 8e12, 2e13] {
            let p = ModelParams::default().with_pump(g).with_drive(0.0);
            let bg = background_state(&p).unwrap();
            let r = crate::rates::complex_rates(&p);
            let c = p.plasmon.n_p * p.plasmon.omega_b_single.powi(2) * (bg.populations[1] - bg.populations[0]);
            let half = (r.gamma21 - r.gamma_n) / 2.0;
            let root = (half * half + c).sqrt();
            let mean = -(r.gamma21 + r.gamma_n) / 2.0;
            let (l1, l2) = (mean + root, mean - root);
            let top = if l1.re >= l2.re { l1 } else { l2 };
            let s = growth_rate(&p).unwrap();
            assert!((s.gamma_s - top.re).abs() <= 1e-9 * p.plasmon.gamma_n, "g={g}: {} vs {}", s.gamma_s, top.re);
            assert!((s.leading.frequency - (p.frame.nu_ref - top.im)).abs() <= 1e-6 * p.plasmon.gamma_n);
        }
    }

    #[test]
    fn detuned_drive_background_is_a_fixed_point() {
        let mut p = ModelParams::default();
        p.drive.delta_a = 2e12;
        let bg = background_state(&p).unwrap();
        let d = Dynamics::new(&p);
        let f = reduced_rhs(&d, &reduced_from(&bg, Complex64::new(0.0, 0.0)));
        let scale = d.rate_scale();
        assert!(f.iter().all(|x| x.abs() < 1e-13 * scale), "{f:?}");
        assert!((bg.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn resonant_background_agrees_with_linear_solve() {
        let p = ModelParams::default();
        let closed = background_state_closed_form(&p).unwrap();
        let mut q = p;
        q.drive.delta_a = 1e-300;
        let solved = background_state(&q).unwrap();
        for k in 0..3 {
            assert!((closed.populations[k] - solved.populations[k]).abs() < 1e-13);
        }
        assert!((closed.rho32 - solved.rho32).norm() < 1e-13);
    }
}
