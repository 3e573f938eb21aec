//! CODATA 2018 physical constants (SI).

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant, J s (exact, derived from h).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum electric permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Electron mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Proton mass, kg.
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;
/// One electronvolt in joules.
pub const ELECTRON_VOLT: f64 = ELEMENTARY_CHARGE;

/// Angular frequency (rad/s) of a photon or plasmon with the given energy in eV.
#[inline]
pub fn angular_frequency_from_ev(energy_ev: f64) -> f64 {
    energy_ev * ELECTRON_VOLT / HBAR
}
