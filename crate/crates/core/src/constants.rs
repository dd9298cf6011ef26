//! CODATA 2018 constants in SI units.

/// Bohr magneton, J/T.
pub const MU_B: f64 = 9.274_010_078_3e-24;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Default Landé factor.
pub const G_DEFAULT: f64 = 2.0;

/// Inverse temperature `1 / (k_B T)` in 1/J.
#[inline]
pub fn beta(temperature: f64) -> f64 {
    1.0 / (K_B * temperature)
}
