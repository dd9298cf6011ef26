//! Exact thermal cumulants of `Sz` from the standard-basis partition function
//! `Z = sum_m exp(beta (A0 + A1 m + A2 m^2))`, `m = s, s-1, ..., -s`.
//!
//! Weights are shifted by their largest exponent before exponentiation, so
//! sub-kelvin temperatures do not overflow. [`partition_function`] undoes the
//! shift and can therefore still overflow to `inf` when `Z` itself does.

use crate::model::{ModelParams, SpinNumber};
use crate::{Error, Result};

/// Normalised Boltzmann weights over `p = 0..=2s`, `m = s - p`.
fn gibbs(spin: SpinNumber, params: &ModelParams, beta: f64) -> (Vec<f64>, f64) {
    let exponents: Vec<f64> = (0..=spin.two_s())
        .map(|p| {
            let m = spin.s() - p as f64;
            beta * (params.a0() + params.a1() * m + params.a2() * m * m)
        })
        .collect();
    let max = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|e| (e - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    (
        weights.into_iter().map(|w| w / total).collect(),
        max + total.ln(),
    )
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be >= 0, got {beta}"
        )));
    }
    Ok(())
}

fn moments(spin: SpinNumber, params: &ModelParams, beta: f64) -> (f64, f64) {
    let (w, _) = gibbs(spin, params, beta);
    w.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (p, w)| {
        let m = spin.s() - p as f64;
        (m1 + w * m, m2 + w * m * m)
    })
}

pub fn ln_partition_function(spin: SpinNumber, params: &ModelParams, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(gibbs(spin, params, beta).1)
}

pub fn partition_function(spin: SpinNumber, params: &ModelParams, beta: f64) -> Result<f64> {
    Ok(ln_partition_function(spin, params, beta)?.exp())
}

/// `<Sz>` in units of hbar.
pub fn mean_sz(spin: SpinNumber, params: &ModelParams, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(moments(spin, params, beta).0)
}

/// `<Sz^2>` in units of hbar^2.
pub fn mean_sz2(spin: SpinNumber, params: &ModelParams, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(moments(spin, params, beta).1)
}

/// Second cumulant `<Sz^2> - <Sz>^2`.
pub fn var_sz(spin: SpinNumber, params: &ModelParams, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let (m1, m2) = moments(spin, params, beta);
    Ok((m2 - m1 * m1).max(0.0))
}

/// `sqrt(var) / mean`; undefined when the mean vanishes.
pub fn fluctuation_ratio(spin: SpinNumber, params: &ModelParams, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let (m1, m2) = moments(spin, params, beta);
    if m1.abs() < 1e-300 || m1.abs() <= 1e-14 * spin.s() {
        return Err(Error::VanishingMean);
    }
    Ok((m2 - m1 * m1).max(0.0).sqrt() / m1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MU_B;
    use proptest::prelude::*;

    fn spin(two_s: u32) -> SpinNumber {
        SpinNumber::new(two_s).unwrap()
    }

    // A1 fixed by mu0_h = 1 T, g = 2; A2 and A0 given in units of A1.
    fn params(a1: f64, a2: f64, a0: f64) -> ModelParams {
        let unit = 2.0 * MU_B;
        ModelParams::new(2.0, a1, (a2 + a0) * unit, a0 * unit).unwrap()
    }

    #[test]
    fn partition_function_examples() {
        let unit = 2.0 * MU_B;
        let p = params(1.0, 0.0, 0.0);
        let b = 0.8 / unit;
        let z = partition_function(spin(1), &p, b).unwrap();
        assert!((z - 2.0 * (0.4f64).cosh()).abs() < 1e-14);

        for two_s in 1..=6 {
            let z = partition_function(spin(two_s), &params(1.0, -2.0, 0.3), 0.0).unwrap();
            assert!((z - (two_s + 1) as f64).abs() < 1e-13);
        }

        let p = params(0.0, 1.5, 0.0);
        let z = partition_function(spin(2), &p, b).unwrap();
        assert!((z - (1.0 + 2.0 * (b * p.a2()).exp())).abs() < 1e-13);
    }

    #[test]
    fn mean_sz_examples() {
        let unit = 2.0 * MU_B;
        for a2 in [0.0, 3.0, -4.0] {
            let m = mean_sz(spin(1), &params(1.0, a2, 0.0), 2.0 / unit).unwrap();
            assert!((m - 0.380797).abs() < 1e-6);
        }
        for two_s in 1..=5 {
            assert!(
                mean_sz(spin(two_s), &params(1.0, -2.0, 0.0), 0.0)
                    .unwrap()
                    .abs()
                    < 1e-15
            );
        }
        for two_s in 1..=5 {
            let m = mean_sz(spin(two_s), &params(1.0, 0.0, 0.0), 1e4 / unit).unwrap();
            assert!((m - spin(two_s).s()).abs() < 1e-12);
        }
        assert!(mean_sz(spin(1), &params(1.0, 0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn var_sz_examples() {
        let unit = 2.0 * MU_B;
        assert!((var_sz(spin(1), &params(1.0, 0.0, 0.0), 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(var_sz(spin(3), &params(1.0, 0.0, 0.0), 1e4 / unit).unwrap() < 1e-12);
        assert!((var_sz(spin(2), &params(1.0, 0.5, 0.0), 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fluctuation_ratio_examples() {
        let unit = 2.0 * MU_B;
        let p = params(1.0, 0.0, 0.0);
        assert!(fluctuation_ratio(spin(4), &p, 1e4 / unit).unwrap().abs() < 1e-6);
        let mean: f64 = 0.380797;
        let want = (0.25 - mean * mean).sqrt() / mean;
        let got = fluctuation_ratio(spin(1), &p, 2.0 / unit).unwrap();
        assert!((got - want).abs() < 1e-5);
        assert!((got - 0.8509).abs() < 1e-4);
        assert!(matches!(
            fluctuation_ratio(spin(2), &p, 0.0),
            Err(Error::VanishingMean)
        ));
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let unit = 2.0 * MU_B;
        let p = params(1.0, 3.0, 0.0);
        let b = 5000.0 / unit;
        assert!(mean_sz(spin(8), &p, b).unwrap().is_finite());
        assert!(ln_partition_function(spin(8), &p, b).unwrap().is_finite());
    }

    proptest! {
        #[test]
        fn a0_shift_invariance(two_s in 1u32..8, a1 in -3.0f64..3.0, a2 in -3.0f64..3.0,
                               a0 in -10.0f64..10.0, x in 0.0f64..5.0) {
            let b = x / (2.0 * MU_B);
            let base = params(a1, a2, 0.0);
            let shifted = params(a1, a2, a0);
            let (m, v) = (mean_sz(spin(two_s), &base, b).unwrap(), var_sz(spin(two_s), &base, b).unwrap());
            prop_assert!((m - mean_sz(spin(two_s), &shifted, b).unwrap()).abs() < 1e-12);
            prop_assert!((v - var_sz(spin(two_s), &shifted, b).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn parity_in_a1(two_s in 1u32..8, a1 in -3.0f64..3.0, a2 in -3.0f64..3.0, x in 0.0f64..5.0) {
            let b = x / (2.0 * MU_B);
            let sp = spin(two_s);
            let (pos, neg) = (params(a1, a2, 0.0), params(-a1, a2, 0.0));
            prop_assert!((mean_sz(sp, &pos, b).unwrap() + mean_sz(sp, &neg, b).unwrap()).abs() < 1e-12);
            prop_assert!((var_sz(sp, &pos, b).unwrap() - var_sz(sp, &neg, b).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn log_z_derivative_is_mean_energy(two_s in 1u32..8, a1 in -3.0f64..3.0,
                                           a2 in -3.0f64..3.0, a0 in -2.0f64..2.0, x in 0.05f64..4.0) {
            let unit = 2.0 * MU_B;
            let sp = spin(two_s);
            let p = params(a1, a2, a0);
            let b = x / unit;
            let h = 1e-4 * b;
            let fd = (ln_partition_function(sp, &p, b + h).unwrap()
                - ln_partition_function(sp, &p, b - h).unwrap()) / (2.0 * h);
            let want = p.a0() + p.a1() * mean_sz(sp, &p, b).unwrap() + p.a2() * mean_sz2(sp, &p, b).unwrap();
            let scale = unit * (1.0 + a0.abs() + a1.abs() * sp.s() + a2.abs() * sp.s() * sp.s());
            prop_assert!((fd - want).abs() <= 1e-8 * scale, "fd={} want={}", fd, want);
        }

        #[test]
        fn spin_half_is_tanh(a1 in -3.0f64..3.0, a2 in -5.0f64..5.0, x in 0.0f64..20.0) {
            let b = x / (2.0 * MU_B);
            let p = params(a1, a2, 0.0);
            let want = 0.5 * (b * p.a1() / 2.0).tanh();
            prop_assert!((mean_sz(spin(1), &p, b).unwrap() - want).abs() < 1e-12);
        }
    }
}
