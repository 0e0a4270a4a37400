//! Physical constants in the working unit system (meV, nm, s).

/// Reduced Planck constant, meV·s.
pub const HBAR_MEV_S: f64 = 6.582119569e-13;

/// Fermi velocity of graphene carriers, m/s.
pub const FERMI_VELOCITY: f64 = 1.0e6;

/// Fermi velocity in nm/s.
pub const FERMI_VELOCITY_NM_S: f64 = FERMI_VELOCITY * 1.0e9;

/// ħ·v_F in meV·nm.
pub const HBAR_VF: f64 = 658.2119569;

/// ħ²/(2mₑ) in meV·nm² (free-electron mass).
pub const HBAR2_OVER_2ME: f64 = 38.099_821_1;

/// Bundle of the constants shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar_vf: f64,
    pub hbar2_over_2me: f64,
    pub v_f: f64,
}

impl PhysicalConstants {
    pub const STANDARD: PhysicalConstants = PhysicalConstants {
        hbar_vf: HBAR_VF,
        hbar2_over_2me: HBAR2_OVER_2ME,
        v_f: FERMI_VELOCITY,
    };
}

/// Dirac-cone energy of a carrier with wavevector `k` (nm⁻¹) above a channel
/// potential `potential` (meV): `E = V + ħv_F·k`.
pub fn energy_from_wavevector(k: f64, potential: f64) -> f64 {
    debug_assert!(k >= 0.0);
    potential + HBAR_VF * k
}

/// Inverse of [`energy_from_wavevector`].
pub fn wavevector_from_energy(energy: f64, potential: f64) -> f64 {
    (energy - potential) / HBAR_VF
}

/// `f_T = v_F / L` with `L` in nm.
pub fn transition_frequency(length_nm: f64) -> f64 {
    FERMI_VELOCITY_NM_S / length_nm
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn hbar_vf_is_product_of_hbar_and_fermi_velocity() {
        // meV·s × m/s → meV·m → meV·nm
        let derived = HBAR_MEV_S * FERMI_VELOCITY * 1.0e9;
        assert!((derived - HBAR_VF).abs() / HBAR_VF < 1e-12);
        assert_eq!(PhysicalConstants::STANDARD.v_f, 1.0e6);
    }

    #[test]
    fn hbar2_over_2me_codata() {
        assert!((HBAR2_OVER_2ME - 38.0998).abs() / 38.0998 < 1e-6);
    }

    #[test]
    fn energy_examples() {
        let k = 4.96 * PI / 200.0;
        assert!((k - 0.0779115).abs() < 1e-7);
        let e = energy_from_wavevector(k, 450.0);
        assert!((e - (450.0 + 658.2119569 * 4.96 * PI / 200.0)).abs() < 1e-12);
        assert!((e - 501.28).abs() < 5e-3);
        assert_eq!(energy_from_wavevector(0.0, 450.0), 450.0);
        assert!((energy_from_wavevector(k, 0.0) - 51.28).abs() < 5e-3);
    }

    #[test]
    fn transition_frequency_of_reference_lengths() {
        assert!((transition_frequency(654.0) / 1.529e12 - 1.0).abs() < 5e-4);
        assert!((transition_frequency(302.0) / 3.311e12 - 1.0).abs() < 5e-4);
    }

    proptest! {
        #[test]
        fn energy_is_affine_in_k(k in 0.0..1.0f64, alpha in 0.0..10.0f64, v in -500.0..500.0f64) {
            let f0 = energy_from_wavevector(0.0, v);
            let lhs = energy_from_wavevector(alpha * k, v) - f0;
            let rhs = alpha * (energy_from_wavevector(k, v) - f0);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }

        #[test]
        fn wavevector_round_trip(k in 0.01..1.0f64, v in 0.0..500.0f64) {
            let back = wavevector_from_energy(energy_from_wavevector(k, v), v);
            prop_assert!(((back - k) / k).abs() < 1e-12);
        }
    }
}
