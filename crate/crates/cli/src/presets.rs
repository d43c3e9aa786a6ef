//! Built-in parameter sets for the standard figure sweeps.
//!
//! A preset is a config fragment merged underneath the user's config file,
//! so anything in the file wins. Each carries `notes` saying which values
//! are quoted from the literature and which are assumptions.

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Plasmon number and inversion against pump for three drive strengths.
    Fig2,
    /// Plasmon number against pump for four dephasing rates.
    Fig3,
    /// Growth rate against drive for three pump rates.
    Fig4a,
    /// Onset transients with and without the drive.
    Fig4b,
}

/// Pump axis shared by the steady-state presets; the range is an assumption.
fn pump_axis() -> Value {
    json!({"path": "gain.pump_g", "min": 0.0, "max": 2.0e13, "count": 81})
}

impl Preset {
    pub fn overlay(self) -> Value {
        match self {
            Preset::Fig2 => json!({
                "model": {"gain": {"gamma_ph": 0.0}},
                "sweep": [
                    {"path": "drive.omega_a_rabi", "values": [0.0, 4.0e12, 16.0e12]},
                    pump_axis()
                ],
                "notes": {
                    "drive.omega_a_rabi": "quoted: 0, 4, 16 x 1e12 s^-1",
                    "gain.pump_g": "assumed: 0 to 2e13 s^-1, 81 points",
                    "gain.gamma_ph": "quoted: 0"
                }
            }),
            Preset::Fig3 => json!({
                "model": {"drive": {"omega_a_rabi": 16.0e12}},
                "sweep": [
                    {"path": "gain.gamma_ph", "values": [0.0, 80.0e12, 160.0e12, 240.0e12]},
                    pump_axis()
                ],
                "notes": {
                    "gain.gamma_ph": "quoted: 0, 80, 160, 240 x 1e12 s^-1",
                    "drive.omega_a_rabi": "quoted: 16e12 s^-1",
                    "gain.pump_g": "assumed: 0 to 2e13 s^-1, 81 points"
                }
            }),
            Preset::Fig4a => json!({
                "model": {"gain": {"gamma_ph": 0.0}},
                "sweep": [
                    {"path": "gain.pump_g", "values": [4.4e12, 6.0e12, 8.0e12]},
                    {"path": "drive.omega_a_rabi", "min": 0.0, "max": 4.0e13, "count": 41}
                ],
                "notes": {
                    "gain.pump_g": "quoted: 4.4, 6, 8 x 1e12 s^-1",
                    "drive.omega_a_rabi": "assumed: 0 to 4e13 s^-1, 41 points"
                }
            }),
            Preset::Fig4b => json!({
                "model": {"gain": {"pump_g": 8.0e12, "gamma_ph": 0.0}},
                "sweep": [{"path": "drive.omega_a_rabi", "values": [0.0, 24.0e12]}],
                "run": {"t_end": 3.0e-12, "record_interval": 2.0e-15, "initial": "background"},
                "notes": {
                    "gain.pump_g": "quoted: 8e12 s^-1",
                    "drive.omega_a_rabi": "quoted: 0 and 24e12 s^-1",
                    "run.initial": "assumed: non-spasing gain medium with a small seed field",
                    "run.t_end": "assumed"
                }
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_value;

    #[test]
    fn every_preset_resolves() {
        for p in Preset::value_variants() {
            let c = parse_value(json!({}), Some(*p)).unwrap();
            assert!(!c.sweep.is_empty());
            assert!(!c.notes.is_empty());
        }
    }

    #[test]
    fn config_file_overrides_the_preset() {
        let c = parse_value(json!({"sweep": [{"path": "gain.pump_g", "values": [1e12]}]}), Some(Preset::Fig2)).unwrap();
        assert_eq!(c.grid(), vec![vec![1e12]]);
    }
}
