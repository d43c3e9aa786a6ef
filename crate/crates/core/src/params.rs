//! Parameter sets describing one spaser configuration.
//!
//! All rates and frequencies are angular (rad/s). Population decay rates are
//! written `gamma_ij` for the |i⟩→|j⟩ channel.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::units::ev_to_angular;

/// Gain-medium chromophore: level structure, relaxation and incoherent pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainParams {
    /// |2⟩→|1⟩ population decay.
    pub gamma21: f64,
    /// |3⟩→|1⟩ population decay.
    pub gamma31: f64,
    /// |3⟩→|2⟩ population decay.
    pub gamma32: f64,
    /// Pure dephasing, added to every coherence decay rate.
    pub gamma_ph: f64,
    /// Incoherent pump |1⟩→|3⟩.
    pub pump_g: f64,
    pub omega21: f64,
    pub omega32: f64,
}

/// Plasmon mode and its coupling to the gain medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmonParams {
    pub omega_n: f64,
    /// Amplitude relaxation rate of the plasmon mode.
    pub gamma_n: f64,
    /// Number of chromophores coupled to the mode.
    pub n_p: f64,
    /// Rabi frequency produced by a single plasmon (coupling per unit amplitude).
    pub omega_b_single: f64,
}

/// Coherent drive on the |2⟩↔|3⟩ transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub omega_a_rabi: f64,
    /// ω₃₂ − ν_a.
    pub delta_a: f64,
}

/// Reference frequency of the frame rotating with the spasing field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub nu_ref: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gain: GainParams,
    pub plasmon: PlasmonParams,
    pub drive: DriveParams,
    pub frame: FrameParams,
}

/// Plasmon mode energy of a 40 nm silver nanosphere in a n = 1.5 host, eV.
pub const PLASMON_ENERGY_EV: f64 = 2.5;
/// ħ(ω₂₁ − ω_n), eV.
pub const GAIN_PLASMON_OFFSET_EV: f64 = 0.002;
/// Plasmon relaxation rate, rad/s.
pub const PLASMON_GAMMA: f64 = 5.3e14;
/// Chromophore count.
pub const CHROMOPHORE_COUNT: f64 = 6.0e4;
/// Host permittivity of the nanosphere environment. Metadata only; the mode
/// function is not computed here.
pub const HOST_PERMITTIVITY: f64 = 2.25;

/// Assumed |2⟩→|1⟩ decay, rad/s.
pub const DEFAULT_GAMMA21: f64 = 7.5e12;
/// Assumed |3⟩→|2⟩ decay, rad/s.
pub const DEFAULT_GAMMA32: f64 = 1.6e12;
/// Assumed |3⟩→|1⟩ decay, rad/s.
pub const DEFAULT_GAMMA31: f64 = 1.0e10;
/// Assumed energy of the driven |2⟩↔|3⟩ transition (mid-IR), eV.
pub const DEFAULT_OMEGA32_EV: f64 = 0.3;
/// Single-plasmon Rabi frequency calibrated so that the drive-free threshold is
/// twice the threshold at Ω_a = 16×10¹² rad/s with the other defaults.
/// Reproduced by `analysis::calibrate_coupling` (regression-tested).
pub const DEFAULT_OMEGA_B_SINGLE: f64 = 5.760_030_786_755_507e12;
pub const DEFAULT_PUMP: f64 = 8.0e12;
pub const DEFAULT_DRIVE: f64 = 16.0e12;

impl Default for GainParams {
    fn default() -> Self {
        Self {
            gamma21: DEFAULT_GAMMA21,
            gamma31: DEFAULT_GAMMA31,
            gamma32: DEFAULT_GAMMA32,
            gamma_ph: 0.0,
            pump_g: DEFAULT_PUMP,
            omega21: ev_to_angular(PLASMON_ENERGY_EV + GAIN_PLASMON_OFFSET_EV),
            omega32: ev_to_angular(DEFAULT_OMEGA32_EV),
        }
    }
}

impl Default for PlasmonParams {
    fn default() -> Self {
        Self {
            omega_n: ev_to_angular(PLASMON_ENERGY_EV),
            gamma_n: PLASMON_GAMMA,
            n_p: CHROMOPHORE_COUNT,
            omega_b_single: DEFAULT_OMEGA_B_SINGLE,
        }
    }
}

impl Default for DriveParams {
    fn default() -> Self {
        Self { omega_a_rabi: DEFAULT_DRIVE, delta_a: 0.0 }
    }
}

impl Default for ModelParams {
    /// Default configuration with the frame placed at the spasing frequency.
    fn default() -> Self {
        let gain = GainParams::default();
        let params = Self {
            gain,
            plasmon: PlasmonParams::default(),
            drive: DriveParams::default(),
            frame: FrameParams { nu_ref: gain.omega21 },
        };
        params.with_spasing_frame()
    }
}

fn check(ok: bool, path: &str, value: f64, rule: &'static str) -> Result<(), ParamError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::Invalid { path: path.to_string(), value, rule })
    }
}

impl GainParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.gamma21 >= 0.0, "gain.gamma21", self.gamma21, "must be >= 0")?;
        check(self.gamma31 >= 0.0, "gain.gamma31", self.gamma31, "must be >= 0")?;
        check(self.gamma32 >= 0.0, "gain.gamma32", self.gamma32, "must be >= 0")?;
        check(self.gamma_ph >= 0.0, "gain.gamma_ph", self.gamma_ph, "must be >= 0")?;
        check(self.pump_g >= 0.0, "gain.pump_g", self.pump_g, "must be >= 0")?;
        check(self.omega21 > 0.0, "gain.omega21", self.omega21, "must be > 0")?;
        check(self.omega32 > 0.0, "gain.omega32", self.omega32, "must be > 0")
    }
}

impl PlasmonParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.omega_n > 0.0, "plasmon.omega_n", self.omega_n, "must be > 0")?;
        check(self.gamma_n > 0.0, "plasmon.gamma_n", self.gamma_n, "must be > 0")?;
        check(self.n_p >= 1.0, "plasmon.n_p", self.n_p, "must be >= 1")?;
        check(
            self.omega_b_single >= 0.0,
            "plasmon.omega_b_single",
            self.omega_b_single,
            "must be >= 0",
        )
    }
}

impl DriveParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.omega_a_rabi >= 0.0, "drive.omega_a_rabi", self.omega_a_rabi, "must be >= 0")?;
        check(true, "drive.delta_a", self.delta_a, "must be finite")
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.gain.validate()?;
        self.plasmon.validate()?;
        self.drive.validate()?;
        check(self.frame.nu_ref > 0.0, "frame.nu_ref", self.frame.nu_ref, "must be > 0")?;
        check(true, "frame.delta_b", self.delta_b(), "must be finite")?;
        check(true, "frame.delta_n", self.delta_n(), "must be finite")?;
        let worst = self.delta_b().abs().max(self.delta_n().abs());
        if worst > 1e-2 * self.frame.nu_ref {
            log::warn!(
                "rotating frame at {:.6e} rad/s is far from resonance (|detuning| = {:.3e}); \
                 slowly-varying envelope is questionable",
                self.frame.nu_ref,
                worst
            );
        }
        Ok(())
    }

    /// Δ_b = ω₂₁ − ν_ref.
    pub fn delta_b(&self) -> f64 {
        self.gain.omega21 - self.frame.nu_ref
    }

    /// Δ_n = ω_n − ν_ref.
    pub fn delta_n(&self) -> f64 {
        self.plasmon.omega_n - self.frame.nu_ref
    }

    /// Copy with the rotating frame moved to `nu_ref`.
    pub fn in_frame(&self, nu_ref: f64) -> Self {
        let mut p = *self;
        p.frame.nu_ref = nu_ref;
        p
    }

    /// Copy with the frame at the closed-form spasing frequency. Falls back to
    /// ω₂₁ when the closed form does not apply (detuned drive or degenerate
    /// rates).
    pub fn with_spasing_frame(&self) -> Self {
        let nu = crate::analysis::spasing_frequency_formula(self)
            .ok()
            .filter(|nu| nu.is_finite() && *nu > 0.0)
            .unwrap_or(self.gain.omega21);
        self.in_frame(nu)
    }

    pub fn with_pump(&self, pump_g: f64) -> Self {
        let mut p = *self;
        p.gain.pump_g = pump_g;
        p
    }

    pub fn with_drive(&self, omega_a_rabi: f64) -> Self {
        let mut p = *self;
        p.drive.omega_a_rabi = omega_a_rabi;
        p
    }

    pub fn with_coupling(&self, omega_b_single: f64) -> Self {
        let mut p = *self;
        p.plasmon.omega_b_single = omega_b_single;
        p
    }

    pub fn with_dephasing(&self, gamma_ph: f64) -> Self {
        let mut p = *self;
        p.gain.gamma_ph = gamma_ph;
        p
    }

    /// N_p·Ω̃_b², the only combination of chromophore count and coupling that
    /// enters the linear spasing condition.
    pub fn collective_coupling_sq(&self) -> f64 {
        self.plasmon.n_p * self.plasmon.omega_b_single * self.plasmon.omega_b_single
    }
}
