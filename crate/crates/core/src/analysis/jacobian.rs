//! Analytic Jacobian of the trace-eliminated real system.
//!
//! Reduced coordinates (10): ρ₁₁, ρ₂₂, Re/Im ρ₂₁, Re/Im ρ₃₁, Re/Im ρ₃₂,
//! Re/Im a₀ₙ, with ρ₃₃ = 1 − ρ₁₁ − ρ₂₂.

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::dynamics::Dynamics;
use crate::state::{DensityMatrix3, SpaserState, PACKED_LEN};

pub const REDUCED_LEN: usize = 10;
pub type Reduced = [f64; REDUCED_LEN];
pub type ReducedJacobian = SMatrix<f64, REDUCED_LEN, REDUCED_LEN>;

/// Column (and row) offsets of the complex pairs in reduced coordinates.
pub const RHO21: usize = 2;
pub const RHO31: usize = 4;
pub const RHO32: usize = 6;
pub const AMP: usize = 8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn reduce(state: &SpaserState) -> Reduced {
    let x = state.pack();
    [x[0], x[1], x[3], x[4], x[5], x[6], x[7], x[8], x[9], x[10]]
}

pub fn expand(z: &Reduced) -> SpaserState {
    let x: [f64; PACKED_LEN] = [z[0], z[1], 1.0 - z[0] - z[1], z[2], z[3], z[4], z[5], z[6], z[7], z[8], z[9]];
    SpaserState::unpack(&x)
}

/// Right-hand side in reduced coordinates.
pub fn reduced_rhs(dynamics: &Dynamics, z: &Reduced) -> Reduced {
    let x = expand(z).pack();
    let mut dx = [0.0; PACKED_LEN];
    dynamics.rhs(&x, &mut dx);
    [dx[0], dx[1], dx[3], dx[4], dx[5], dx[6], dx[7], dx[8], dx[9], dx[10]]
}

struct Builder {
    j: ReducedJacobian,
}

impl Builder {
    /// Complex output at `row` (pair), complex input at `col` (pair), given
    /// the Wirtinger derivatives A = ∂f/∂z and B = ∂f/∂z̄.
    fn cc(&mut self, row: usize, col: usize, a: Complex64, b: Complex64) {
        let dx = a + b;
        let dy = I * (a - b);
        self.j[(row, col)] += dx.re;
        self.j[(row + 1, col)] += dx.im;
        self.j[(row, col + 1)] += dy.re;
        self.j[(row + 1, col + 1)] += dy.im;
    }

    /// Real output at `row`, complex input at `col`.
    fn rc(&mut self, row: usize, col: usize, a: Complex64, b: Complex64) {
        self.j[(row, col)] += (a + b).re;
        self.j[(row, col + 1)] += (I * (a - b)).re;
    }

    /// Complex output at `row`, real input at `col`.
    fn cr(&mut self, row: usize, col: usize, d: Complex64) {
        self.j[(row, col)] += d.re;
        self.j[(row + 1, col)] += d.im;
    }
}

/// ∂f/∂z at `z`.
pub fn analytic_jacobian(d: &Dynamics, z: &Reduced) -> ReducedJacobian {
    let s = expand(z);
    let [p1, p2, _] = s.rho.populations;
    let (r21, r31, r32, amp) = (s.rho.rho21, s.rho.rho31, s.rho.rho32, s.amplitude);
    let w = d.coupling;
    let wa = d.drive;
    let zero = Complex64::new(0.0, 0.0);
    let mut b = Builder { j: ReducedJacobian::zeros() };

    // ρ̇₁₁
    b.j[(0, 0)] = -d.pump - d.gamma31;
    b.j[(0, 1)] = d.gamma21 - d.gamma31;
    b.rc(0, RHO21, I * w * amp.conj(), -I * w * amp);
    b.rc(0, AMP, -I * w * r21.conj(), I * w * r21);

    // ρ̇₂₂
    b.j[(1, 0)] = -d.gamma32;
    b.j[(1, 1)] = -d.gamma21 - d.gamma32;
    b.rc(1, RHO21, -I * w * amp.conj(), I * w * amp);
    b.rc(1, AMP, I * w * r21.conj(), -I * w * r21);
    b.rc(1, RHO32, I * wa, -I * wa);

    // ρ̇₂₁
    b.cr(RHO21, 0, I * w * amp);
    b.cr(RHO21, 1, -I * w * amp);
    b.cc(RHO21, RHO21, -d.rates.gamma21, zero);
    b.cc(RHO21, RHO31, I * wa, zero);
    b.cc(RHO21, AMP, I * w * (p1 - p2), zero);

    // ρ̇₃₁
    b.cc(RHO31, RHO31, -d.rates.gamma31, zero);
    b.cc(RHO31, RHO21, I * wa, zero);
    b.cc(RHO31, AMP, -I * w * r32, zero);
    b.cc(RHO31, RHO32, -I * w * amp, zero);

    // ρ̇₃₂, with ρ₂₂ − ρ₃₃ = ρ₁₁ + 2ρ₂₂ − 1
    b.cr(RHO32, 0, I * wa);
    b.cr(RHO32, 1, 2.0 * I * wa);
    b.cc(RHO32, RHO32, -d.rates.gamma32, zero);
    b.cc(RHO32, RHO31, -I * w * amp.conj(), zero);
    b.cc(RHO32, AMP, zero, -I * w * r31);

    // ȧ₀ₙ
    b.cc(AMP, AMP, -d.rates.gamma_n, zero);
    b.cc(AMP, RHO21, I * d.n_p * w, zero);

    b.j
}

/// Reduced state from a density matrix and amplitude.
pub fn reduced_from(rho: &DensityMatrix3, amplitude: Complex64) -> Reduced {
    reduce(&SpaserState::new(*rho, amplitude))
}
