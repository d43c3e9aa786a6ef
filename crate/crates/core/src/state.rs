use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::StateError;

/// Number of real components of a packed [`SpaserState`].
pub const PACKED_LEN: usize = 11;

/// Hermitian 3×3 density matrix in the basis |1⟩, |2⟩, |3⟩.
///
/// Only the independent entries are stored (three real populations and the
/// lower-triangle coherences ρ₂₁, ρ₃₁, ρ₃₂), so the reconstructed matrix is
/// Hermitian exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix3 {
    pub populations: [f64; 3],
    pub rho21: Complex64,
    pub rho31: Complex64,
    pub rho32: Complex64,
}

impl DensityMatrix3 {
    /// Pure state |level⟩, with `level` in 1..=3.
    pub fn pure(level: usize) -> Self {
        assert!((1..=3).contains(&level), "level must be 1, 2 or 3");
        let mut populations = [0.0; 3];
        populations[level - 1] = 1.0;
        Self {
            populations,
            rho21: Complex64::new(0.0, 0.0),
            rho31: Complex64::new(0.0, 0.0),
            rho32: Complex64::new(0.0, 0.0),
        }
    }

    pub fn ground() -> Self {
        Self::pure(1)
    }

    pub fn trace(&self) -> f64 {
        self.populations.iter().sum()
    }

    /// Full matrix, `m[i][j] = ⟨i+1|ρ|j+1⟩`.
    pub fn to_matrix(&self) -> [[Complex64; 3]; 3] {
        let p = |x: f64| Complex64::new(x, 0.0);
        let [p1, p2, p3] = self.populations;
        [
            [p(p1), self.rho21.conj(), self.rho31.conj()],
            [self.rho21, p(p2), self.rho32.conj()],
            [self.rho31, self.rho32, p(p3)],
        ]
    }

    /// Checks trace and population bounds against `tol`.
    pub fn validate(&self, tol: f64) -> Result<(), StateError> {
        let finite = self.populations.iter().all(|x| x.is_finite())
            && [self.rho21, self.rho31, self.rho32].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(StateError::NonFinite);
        }
        let deviation = (self.trace() - 1.0).abs();
        if deviation > tol {
            return Err(StateError::Trace { deviation });
        }
        for (i, &value) in self.populations.iter().enumerate() {
            if value < -tol || value > 1.0 + tol {
                return Err(StateError::Population { level: i + 1, value, tol });
            }
        }
        Ok(())
    }
}

/// Gain-medium density matrix together with the slowly varying plasmon
/// amplitude a₀ₙ (|a₀ₙ|² is the number of coherent plasmons).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaserState {
    pub rho: DensityMatrix3,
    pub amplitude: Complex64,
}

impl SpaserState {
    pub fn new(rho: DensityMatrix3, amplitude: Complex64) -> Self {
        Self { rho, amplitude }
    }

    /// All chromophores in |1⟩ with a small seed amplitude.
    pub fn seeded_ground(seed_amplitude: f64) -> Self {
        Self::new(DensityMatrix3::ground(), Complex64::new(seed_amplitude, 0.0))
    }

    pub fn plasmon_number(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    pub fn pack(&self) -> [f64; PACKED_LEN] {
        let r = &self.rho;
        [
            r.populations[0],
            r.populations[1],
            r.populations[2],
            r.rho21.re,
            r.rho21.im,
            r.rho31.re,
            r.rho31.im,
            r.rho32.re,
            r.rho32.im,
            self.amplitude.re,
            self.amplitude.im,
        ]
    }

    pub fn unpack(x: &[f64; PACKED_LEN]) -> Self {
        Self {
            rho: DensityMatrix3 {
                populations: [x[0], x[1], x[2]],
                rho21: Complex64::new(x[3], x[4]),
                rho31: Complex64::new(x[5], x[6]),
                rho32: Complex64::new(x[7], x[8]),
            },
            amplitude: Complex64::new(x[9], x[10]),
        }
    }

    /// Multiplies the amplitude and the coherences that carry the spasing
    /// phase (ρ₂₁, ρ₃₁) by e^{iθ}.
    pub fn rotate_phase(&self, theta: f64) -> Self {
        let u = Complex64::from_polar(1.0, theta);
        let mut s = *self;
        s.amplitude *= u;
        s.rho.rho21 *= u;
        s.rho.rho31 *= u;
        s
    }

    pub fn observables(&self) -> Observables {
        let [p1, p2, p3] = self.rho.populations;
        Observables {
            plasmon_number: self.plasmon_number(),
            n21: p2 - p1,
            n32: p3 - p2,
            excited_minus_ground: p2 + p3 - p1,
            rho21: self.rho.rho21,
            rho31: self.rho.rho31,
            rho32: self.rho.rho32,
        }
    }
}

/// Derived quantities of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub plasmon_number: f64,
    /// ρ₂₂ − ρ₁₁, inversion on the spasing transition.
    pub n21: f64,
    /// ρ₃₃ − ρ₂₂.
    pub n32: f64,
    /// ρ₂₂ + ρ₃₃ − ρ₁₁.
    pub excited_minus_ground: f64,
    pub rho21: Complex64,
    pub rho31: Complex64,
    pub rho32: Complex64,
}

/// Time derivative of a [`SpaserState`]. Same layout, no invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateRate {
    pub populations: [f64; 3],
    pub rho21: Complex64,
    pub rho31: Complex64,
    pub rho32: Complex64,
    pub amplitude: Complex64,
}

impl StateRate {
    pub fn from_packed(x: &[f64; PACKED_LEN]) -> Self {
        let s = SpaserState::unpack(x);
        Self {
            populations: s.rho.populations,
            rho21: s.rho.rho21,
            rho31: s.rho.rho31,
            rho32: s.rho.rho32,
            amplitude: s.amplitude,
        }
    }

    pub fn trace(&self) -> f64 {
        self.populations.iter().sum()
    }
}
