//! Truncated power series in the inverse temperature `beta`.
//!
//! A [`TruncatedSeries`] stores `coeffs[j]`, the coefficient of `beta^j`, for
//! `j = 0..=order`. Binary operations require equal orders and never change
//! the order, except [`TruncatedSeries::divide_by_beta`] which drops one.
//!
//! The slice kernels (`mul_into`, `div_into`, ...) are what the field
//! evaluators call in the integrator's inner loop; they write into caller
//! buffers and do not allocate.

use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "a truncated series needs at least one coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    /// `value * beta` truncated at `order`.
    pub fn linear(value: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = value;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Evaluates the polynomial at `beta` (Horner).
    pub fn eval(&self, beta: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * beta + c)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let mut out = vec![0.0; self.coeffs.len()];
        mul_into(&self.coeffs, &other.coeffs, &mut out);
        Ok(Self { coeffs: out })
    }

    /// `self / other`; the divisor needs a nonzero constant term.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        if other.coeffs[0] == 0.0 {
            return Err(Error::ZeroDivisor);
        }
        let mut out = vec![0.0; self.coeffs.len()];
        div_into(&self.coeffs, &other.coeffs, &mut out);
        Ok(Self { coeffs: out })
    }

    /// `c * exp(self)` for a series without constant term.
    pub fn exp(&self, c: f64) -> Result<Self> {
        if self.coeffs[0] != 0.0 {
            return Err(Error::NonZeroConstant(self.coeffs[0]));
        }
        let mut out = vec![0.0; self.coeffs.len()];
        exp_into(&self.coeffs, &mut out);
        for v in &mut out {
            *v *= c;
        }
        Ok(Self { coeffs: out })
    }

    /// Natural logarithm; the constant term must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if !(a0 > 0.0) {
            return Err(Error::NonPositiveConstant(a0));
        }
        let mut out = vec![0.0; self.coeffs.len()];
        ln_into(&self.coeffs, &mut out);
        Ok(Self { coeffs: out })
    }

    /// Maps `c1 beta + c2 beta^2 + ...` to `c1 + c2 beta + ...`, one order lower.
    pub fn divide_by_beta(&self) -> Result<Self> {
        if self.coeffs[0] != 0.0 {
            return Err(Error::NonZeroConstant(self.coeffs[0]));
        }
        if self.order() == 0 {
            return Err(Error::InvalidParameter(
                "cannot divide an order-0 series by beta".into(),
            ));
        }
        Ok(Self {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·β")?,
                _ => write!(f, "{c}·β^{j}")?,
            }
        }
        write!(f, " + O(β^{})", self.coeffs.len())
    }
}

/// `out = a * b` truncated at `out.len()`.
pub(crate) fn mul_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    for k in 0..out.len() {
        out[k] = (0..=k).map(|j| a[j] * b[k - j]).sum();
    }
}

/// `out = a / b`, requires `b[0] != 0`.
pub(crate) fn div_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    let inv = 1.0 / b[0];
    for k in 0..out.len() {
        let acc: f64 = (1..=k).map(|j| b[j] * out[k - j]).sum();
        out[k] = (a[k] - acc) * inv;
    }
}

/// `out = exp(a)` for `a[0] == 0`, from `k e_k = sum_j j a_j e_{k-j}`.
pub(crate) fn exp_into(a: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    for k in 1..out.len() {
        let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * out[k - j]).sum();
        out[k] = acc / k as f64;
    }
}

/// `out = ln(a)` for `a[0] > 0`, from `a l' = a'`.
pub(crate) fn ln_into(a: &[f64], out: &mut [f64]) {
    let inv = 1.0 / a[0];
    out[0] = a[0].ln();
    for k in 1..out.len() {
        let acc: f64 = (1..k).map(|j| j as f64 * out[j] * a[k - j]).sum();
        out[k] = (k as f64 * a[k] - acc) * inv / k as f64;
    }
}
