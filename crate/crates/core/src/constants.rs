//! Physical constants (CODATA 2018) frozen in one place so that every unit
//! conversion in the crate goes through the same numbers.

/// Planck constant, J·s.
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Speed of light in cm/ps; converts wavenumbers to inverse picoseconds.
pub const SPEED_OF_LIGHT_CM_PER_PS: f64 = SPEED_OF_LIGHT * 100.0 * 1e-12;

/// Angular frequency (rad/ps) per unit energy in cm⁻¹: ω = 2πc·E.
pub const CM1_TO_RAD_PER_PS: f64 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_PS;

/// Thermal energy k_B·T expressed in cm⁻¹.
pub fn thermal_energy_cm1(temperature_k: f64) -> f64 {
    BOLTZMANN * temperature_k / (PLANCK_H * SPEED_OF_LIGHT * 100.0)
}

/// Rotational constant in cm⁻¹ from a principal moment of inertia in kg·m².
pub fn rotational_constant_cm1(inertia_kg_m2: f64) -> f64 {
    PLANCK_H / (8.0 * std::f64::consts::PI.powi(2) * SPEED_OF_LIGHT * 100.0 * inertia_kg_m2)
}
