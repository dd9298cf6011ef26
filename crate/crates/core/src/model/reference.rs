//! Closed-form expressions for low spins, written out term by term.
//!
//! These are independent of the series machinery in the parent module and
//! serve as cross-checks for it. Energies are in joules, `beta` in 1/J,
//! fields in tesla.

use crate::constants::MU_B;

/// `L(2s, |z|^2)` for `2s = 1..=4`.
pub fn l_polynomial(two_s: u32, a1: f64, a2: f64, beta: f64, zsq: f64) -> Option<f64> {
    let e = |x: f64| (x * beta).exp();
    let v = match two_s {
        1 => zsq * e(-a1) + 1.0,
        2 => zsq.powi(2) * e(-2.0 * a1) + 2.0 * zsq * e(-a1 - a2) + 1.0,
        3 => {
            zsq.powi(3) * e(-3.0 * a1)
                + 3.0 * zsq.powi(2) * e(-2.0 * a1 - 2.0 * a2)
                + 3.0 * zsq * e(-a1 - 2.0 * a2)
                + 1.0
        }
        4 => {
            zsq.powi(4) * e(-4.0 * a1)
                + 4.0 * zsq.powi(3) * e(-3.0 * a1 - 3.0 * a2)
                + 6.0 * zsq.powi(2) * e(-2.0 * a1 - 4.0 * a2)
                + 4.0 * zsq * e(-a1 - 3.0 * a2)
                + 1.0
        }
        _ => return None,
    };
    Some(v)
}

/// Classical-limit Hamiltonian as a rational function of `|z|^2`, `2s = 1..=4`.
pub fn h0_of_zsq(two_s: u32, a1: f64, a2: f64, zsq: f64) -> Option<f64> {
    let den = zsq.powi(2) + 2.0 * zsq + 1.0;
    let v = match two_s {
        1 => a1 * zsq / (zsq + 1.0),
        2 => 2.0 * zsq * (a1 * zsq + a1 + a2) / den,
        3 => 3.0 * zsq * (a1 * zsq + a1 + 2.0 * a2) / den,
        4 => 4.0 * zsq * (a1 * zsq + a1 + 3.0 * a2) / den,
        _ => return None,
    };
    Some(v)
}

/// Classical-limit Hamiltonian on the sphere, any spin.
pub fn h0_of_uz(two_s: u32, a1: f64, a2: f64, uz: f64) -> f64 {
    let s = two_s as f64 / 2.0;
    a1 * s * (1.0 - uz) + a2 * s * (2.0 * s - 1.0) / 2.0 * (1.0 - uz * uz)
}

/// Classical-limit field, any spin.
pub fn b0(two_s: u32, g: f64, a1: f64, a2: f64, uz: f64) -> f64 {
    let s = two_s as f64 / 2.0;
    (a1 + (2.0 * s - 1.0) * a2 * uz) / (g * MU_B)
}

/// First high-temperature correction for `s = 1` as a function of `|z|^2`.
pub fn h1_spin_one_of_zsq(a1: f64, a2: f64, zsq: f64) -> f64 {
    let z2 = zsq;
    let z4 = z2 * z2;
    let num = z2
        * (-a1 * a1 * z4 - 2.0 * a1 * a1 * z2 - a1 * a1 + 2.0 * a1 * a2 * z4
            - 2.0 * a1 * a2
            - a2 * a2 * z4
            - a2 * a2);
    let den = z4 * z4 + 4.0 * z4 * z2 + 6.0 * z4 + 4.0 * z2 + 1.0;
    num / den
}

/// First high-temperature correction for `s = 1` on the sphere.
pub fn h1_spin_one_of_uz(a1: f64, a2: f64, uz: f64) -> f64 {
    (2.0 * a1 * a1 * uz.powi(2) - 2.0 * a1 * a1 + 4.0 * a1 * a2 * uz.powi(3) - 4.0 * a1 * a2 * uz
        + a2 * a2 * uz.powi(4)
        - a2 * a2)
        / 8.0
}

/// First high-temperature field correction for `s = 1` (coefficient of `beta`).
pub fn b1_spin_one(g: f64, a1: f64, a2: f64, uz: f64) -> f64 {
    (-a1 * a1 * uz - 3.0 * a1 * a2 * uz.powi(2) + a1 * a2 - a2 * a2 * uz.powi(3)) / (2.0 * g * MU_B)
}

/// Exact-log Hamiltonian for `s = 1` in the `|z|^2` form.
pub fn exact_h_spin_one_of_zsq(a1: f64, a2: f64, beta: f64, zsq: f64) -> f64 {
    let den = zsq.powi(2) * (a2 * beta).exp()
        + 2.0 * zsq * (a1 * beta).exp()
        + (beta * (2.0 * a1 + a2)).exp();
    2.0 * a1 + a2 + ((zsq + 1.0).powi(2) / den).ln() / beta
}

fn spin_one_denominator(a1: f64, a2: f64, beta: f64, uz: f64) -> f64 {
    (uz - 1.0).powi(2) * (a2 * beta).exp() - 2.0 * (uz - 1.0) * (uz + 1.0) * (a1 * beta).exp()
        + (uz + 1.0).powi(2) * (beta * (2.0 * a1 + a2)).exp()
}

/// Exact-log Hamiltonian for `s = 1` on the sphere.
pub fn exact_h_spin_one_of_uz(a1: f64, a2: f64, beta: f64, uz: f64) -> f64 {
    2.0 * a1 + a2 + (4.0 / spin_one_denominator(a1, a2, beta, uz)).ln() / beta
}

/// Exact-log field for `s = 1`.
pub fn exact_b_spin_one(g: f64, a1: f64, a2: f64, beta: f64, uz: f64) -> f64 {
    let num = 2.0
        * ((1.0 - uz) * (a1 * beta).exp() + (uz - 1.0) * (a2 * beta).exp()
            - (uz + 1.0) * (a1 * beta).exp()
            + (uz + 1.0) * (beta * (2.0 * a1 + a2)).exp());
    num / (MU_B * beta * g * spin_one_denominator(a1, a2, beta, uz))
}
