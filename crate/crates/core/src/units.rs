//! Energy/frequency conversions. Everything inside the crate is in rad/s and
//! seconds; electron-volts only appear at the configuration boundary.

/// Reduced Planck constant in eV·s (CODATA 2018, exact to the quoted digits).
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Converts a photon energy in eV to an angular frequency in rad/s.
pub fn ev_to_angular(energy_ev: f64) -> f64 {
    energy_ev / HBAR_EV_S
}

/// Inverse of [`ev_to_angular`].
pub fn angular_to_ev(omega: f64) -> f64 {
    omega * HBAR_EV_S
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_energy_is_zero_frequency() {
        assert_eq!(ev_to_angular(0.0), 0.0);
    }

    #[test]
    fn one_ev() {
        assert_relative_eq!(ev_to_angular(1.0), 1.519268e15, max_relative = 1e-6);
    }

    #[test]
    fn nanosphere_plasmon_energy() {
        assert_relative_eq!(ev_to_angular(2.5), 3.798e15, max_relative = 1e-3);
    }

    #[test]
    fn round_trip() {
        for e in [0.002, 0.3, 2.5, 10.0] {
            assert_relative_eq!(angular_to_ev(ev_to_angular(e)), e, max_relative = 1e-15);
        }
    }
}
