//! Paramagnetic couplings, the spin-coherent-state polynomial `L`, and the
//! effective Hamiltonians and fields on the unit sphere.
//!
//! The quantum Hamiltonian is `H = -A0 - A1 Sz - A2 Sz^2` with
//! `A0 = lambda_sigma`, `A1 = g mu_B mu0 H` and `A2 = K - lambda_sigma`.
//! Its Gibbs weight in the coherent state `|z>` is `L(2s, beta, |z|^2) /
//! (1 + |z|^2)^(2s)` up to a constant, which defines the effective classical
//! Hamiltonian `H_eff = -(1/beta) ln(L / (1 + |z|^2)^(2s))`.
//!
//! Every evaluation below goes through the pole-safe weights
//! `C(2s,p) ((1-u)/2)^p ((1+u)/2)^(2s-p)`, which equal
//! `C(2s,p) |z|^(2p) / (1 + |z|^2)^(2s)` under `|z|^2 = (1-u)/(1+u)` and stay
//! finite at both poles.

pub mod reference;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constants::{K_B, MU_B};
use crate::series::{self, TruncatedSeries};
use crate::vec3::{norm, Vec3};
use crate::{Error, Result};

/// Largest supported `2s`; binomials stay exact in `u128` well past this.
pub const MAX_TWO_S: u32 = 60;
/// Largest supported high-temperature order.
pub const MAX_HIGH_T_ORDER: u32 = 24;
/// Distance from the poles at which exact-log evaluation clamps `u_z`.
pub const POLE_CLAMP: f64 = 1e-12;

// Internal energy unit for the series; keeps `c^k / k!` away from underflow.
const ENERGY_UNIT: f64 = K_B;

/// Principal quantum number `s`, stored as `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpinNumber(u32);

impl SpinNumber {
    pub fn new(two_s: u32) -> Result<Self> {
        if two_s == 0 || two_s > MAX_TWO_S {
            return Err(Error::InvalidParameter(format!(
                "2s must be in 1..={MAX_TWO_S}, got {two_s}"
            )));
        }
        Ok(Self(two_s))
    }

    pub fn two_s(self) -> u32 {
        self.0
    }

    pub fn s(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Number of `Sz` eigenstates, `2s + 1`.
    pub fn multiplicity(self) -> usize {
        self.0 as usize + 1
    }
}

impl TryFrom<u32> for SpinNumber {
    type Error = Error;
    fn try_from(v: u32) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpinNumber> for u32 {
    fn from(s: SpinNumber) -> u32 {
        s.0
    }
}

impl fmt::Display for SpinNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Physical couplings. Field and easy axis both lie along `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Landé factor.
    pub g: f64,
    /// Applied field `mu0 H_z` in tesla.
    pub mu0_h: f64,
    /// Uniaxial anisotropy in joules.
    pub k: f64,
    /// Magneto-elastic scalar `lambda sigma` in joules.
    pub lambda_sigma: f64,
}

impl ModelParams {
    pub fn new(g: f64, mu0_h: f64, k: f64, lambda_sigma: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "g must be positive, got {g}"
            )));
        }
        for (name, v) in [("mu0_h", mu0_h), ("K", k), ("lambda_sigma", lambda_sigma)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(Self {
            g,
            mu0_h,
            k,
            lambda_sigma,
        })
    }

    pub fn a0(&self) -> f64 {
        self.lambda_sigma
    }

    pub fn a1(&self) -> f64 {
        self.g * MU_B * self.mu0_h
    }

    pub fn a2(&self) -> f64 {
        self.k - self.lambda_sigma
    }
}

/// Exponent of the `p`-th term of `L`: `A2 p^2 - (2s A2 + A1) p`.
fn exponent(spin: SpinNumber, params: &ModelParams, p: u32) -> f64 {
    let p = p as f64;
    let a2 = params.a2();
    a2 * p * p - (spin.two_s() as f64 * a2 + params.a1()) * p
}

/// Exact binomial coefficient as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc as f64
}

fn check_uz(u_z: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&u_z) {
        return Err(Error::InvalidParameter(format!(
            "u_z must lie in [-1, 1], got {u_z}"
        )));
    }
    Ok(())
}

/// Point on the unit sphere together with its stereographic label `|z|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereCoordinate {
    pub u: Vec3,
    pub zsq: f64,
}

impl SphereCoordinate {
    pub fn new(u: Vec3) -> Result<Self> {
        if (norm(u) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "sphere coordinate must be a unit vector, |u| = {}",
                norm(u)
            )));
        }
        let zsq = stereographic(u[2].clamp(-1.0, 1.0))?;
        Ok(Self { u, zsq })
    }
}

/// `|z|^2 = (1 - u_z) / (1 + u_z)`.
pub fn stereographic(u_z: f64) -> Result<f64> {
    check_uz(u_z)?;
    if u_z == -1.0 {
        return Err(Error::Pole);
    }
    Ok((1.0 - u_z) / (1.0 + u_z))
}

/// `L(2s, beta, |z|^2) = sum_p C(2s,p) |z|^(2p) exp(beta A2 p^2) exp(-beta (2s A2 + A1) p)`.
pub fn l_polynomial(spin: SpinNumber, params: &ModelParams, beta: f64, zsq: f64) -> Result<f64> {
    if !(beta >= 0.0) || !(zsq >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "L needs beta >= 0 and |z|^2 >= 0, got beta = {beta}, |z|^2 = {zsq}"
        )));
    }
    Ok((0..=spin.two_s())
        .map(|p| {
            let a2 = params.a2();
            let pf = p as f64;
            binomial(spin.two_s(), p)
                * zsq.powi(p as i32)
                * (beta * a2 * pf * pf).exp()
                * (-beta * (spin.two_s() as f64 * a2 + params.a1()) * pf).exp()
        })
        .sum())
}

/// `ln C(2s,p) + p ln((1-u)/2) + (2s-p) ln((1+u)/2)`, possibly `-inf` at a pole.
fn log_weight(two_s: u32, p: u32, u_z: f64) -> f64 {
    let w = 0.5 * (1.0 - u_z);
    let lw = if p == 0 { 0.0 } else { p as f64 * w.ln() };
    let lv = if p == two_s {
        0.0
    } else {
        (two_s - p) as f64 * (1.0 - w).ln()
    };
    binomial(two_s, p).ln() + lw + lv
}

/// `ln(L / (1 + |z|^2)^(2s))` in pole-safe log-sum-exp form.
pub fn log_gibbs_weight(spin: SpinNumber, params: &ModelParams, beta: f64, u_z: f64) -> f64 {
    let terms: Vec<f64> = (0..=spin.two_s())
        .map(|p| log_weight(spin.two_s(), p, u_z) + beta * exponent(spin, params, p))
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Classical limit `A1 s (1 - u) + A2 s (2s-1)/2 (1 - u^2)`.
pub fn classical_hamiltonian(spin: SpinNumber, params: &ModelParams, u_z: f64) -> f64 {
    let s = spin.s();
    params.a1() * s * (1.0 - u_z) + params.a2() * s * (2.0 * s - 1.0) / 2.0 * (1.0 - u_z * u_z)
}

/// `H_eff = -(1/beta) ln(L / (1 + |z|^2)^(2s))` in joules.
pub fn exact_hamiltonian(
    spin: SpinNumber,
    params: &ModelParams,
    beta: f64,
    u_z: f64,
) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive, got {beta}"
        )));
    }
    check_uz(u_z)?;
    Ok(-log_gibbs_weight(spin, params, beta, u_z) / beta)
}

/// Weights `C(2s,p) w^p (1-w)^(2s-p)` and their `u_z` derivatives, `w = (1-u)/2`.
fn weights_and_slopes(two_s: u32, u_z: f64, weights: &mut [f64], slopes: &mut [f64]) {
    let w = 0.5 * (1.0 - u_z);
    let v = 0.5 * (1.0 + u_z);
    for p in 0..=two_s {
        let c = binomial(two_s, p);
        let q = two_s - p;
        weights[p as usize] = c * w.powi(p as i32) * v.powi(q as i32);
        // d/du = -1/2 d/dw, with d/dw [w^p v^q] = p w^(p-1) v^q - q w^p v^(q-1)
        let dw = if p == 0 {
            0.0
        } else {
            p as f64 * w.powi(p as i32 - 1) * v.powi(q as i32)
        };
        let dv = if q == 0 {
            0.0
        } else {
            q as f64 * w.powi(p as i32) * v.powi(q as i32 - 1)
        };
        slopes[p as usize] = -0.5 * c * (dw - dv);
    }
}

/// Per-`p` series `exp(c_p x)` in the scaled variable `x = beta * ENERGY_UNIT`.
fn exponent_series(spin: SpinNumber, params: &ModelParams, len: usize) -> Vec<Vec<f64>> {
    (0..=spin.two_s())
        .map(|p| {
            let c = exponent(spin, params, p) / ENERGY_UNIT;
            let mut lin = vec![0.0; len];
            if len > 1 {
                lin[1] = c;
            }
            let mut out = vec![0.0; len];
            series::exp_into(&lin, &mut out);
            out
        })
        .collect()
}

/// Coefficients `H^(j)(u_z)`, `j = 0..=order`, of `H_eff = sum_j beta^j H^(j)`.
///
/// `L / (1 + |z|^2)^(2s)` is formed as a series in `beta` to order `order + 1`,
/// then `ln`, division by `beta` and negation give the Hamiltonian series.
/// Entry `j` is in J^(j+1).
pub fn high_t_hamiltonian_coefficients(
    spin: SpinNumber,
    params: &ModelParams,
    order: u32,
    u_z: f64,
) -> Result<Vec<f64>> {
    check_uz(u_z)?;
    let len = order as usize + 2;
    let mut weights = vec![0.0; spin.multiplicity()];
    let mut slopes = vec![0.0; spin.multiplicity()];
    weights_and_slopes(spin.two_s(), u_z, &mut weights, &mut slopes);

    let mut gibbs = TruncatedSeries::zero(len - 1);
    for (p, w) in weights.iter().enumerate() {
        let c = exponent(spin, params, p as u32) / ENERGY_UNIT;
        let term = TruncatedSeries::linear(c, len - 1).exp(*w)?;
        gibbs = gibbs.add(&term)?;
    }
    // The weights sum to one; dividing by the rounded sum makes the constant
    // term exactly 1 so the logarithm has an exactly vanishing constant.
    let norm = gibbs.coeffs()[0];
    let gibbs = TruncatedSeries::new(gibbs.coeffs().iter().map(|c| c / norm).collect())?;
    let h = gibbs.ln()?.divide_by_beta()?.scaled(-1.0);
    Ok(h.coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c * ENERGY_UNIT.powi(j as i32 + 1))
        .collect())
}

/// Crossover temperature in kelvin below which a truncated high-temperature
/// expansion stops being reliable.
pub fn validity_scale(spin: SpinNumber, params: &ModelParams) -> f64 {
    let s = spin.s();
    let zeeman = params.a1().abs() * s;
    let anisotropy = params.a2().abs() * s * (2.0 * s - 1.0) / 2.0;
    zeeman.max(anisotropy) / K_B
}

/// Which effective Hamiltonian drives the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldModelKind {
    /// `N = 0`, the `beta`-independent classical limit.
    ClassicalLimit,
    /// High-temperature expansion truncated at order `N >= 1`.
    HighT(u32),
    /// The full logarithm, valid at every temperature.
    ExactLog,
}

impl FieldModelKind {
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FieldModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldModelKind::ClassicalLimit => write!(f, "classical"),
            FieldModelKind::HighT(n) => write!(f, "hight:{n}"),
            FieldModelKind::ExactLog => write!(f, "exact"),
        }
    }
}

impl FromStr for FieldModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "classical" | "hight:0" => Ok(FieldModelKind::ClassicalLimit),
            "exact" => Ok(FieldModelKind::ExactLog),
            _ => {
                let order = s
                    .strip_prefix("hight:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "unknown field model '{s}', expected classical|hight:N|exact"
                        ))
                    })?;
                if order > MAX_HIGH_T_ORDER {
                    return Err(Error::Config(format!(
                        "high-temperature order {order} exceeds {MAX_HIGH_T_ORDER}"
                    )));
                }
                Ok(FieldModelKind::HighT(order))
            }
        }
    }
}

impl Serialize for FieldModelKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldModelKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An effective field `u_z -> B_z` ready for the integrator.
#[derive(Debug, Clone)]
pub struct FieldModel {
    kind: FieldModelKind,
    params: ModelParams,
    spin: SpinNumber,
    // exp(c_p x) per p, length order + 2; only for HighT
    exponent_series: Vec<Vec<f64>>,
}

impl FieldModel {
    pub fn new(kind: FieldModelKind, params: ModelParams, spin: SpinNumber) -> Result<Self> {
        let exponent_series = match kind {
            FieldModelKind::HighT(0) => {
                return Err(Error::InvalidParameter(
                    "high-temperature order 0 is the classical limit".into(),
                ))
            }
            FieldModelKind::HighT(n) if n > MAX_HIGH_T_ORDER => {
                return Err(Error::InvalidParameter(format!(
                    "high-temperature order {n} exceeds {MAX_HIGH_T_ORDER}"
                )))
            }
            FieldModelKind::HighT(n) => exponent_series(spin, &params, n as usize + 2),
            _ => Vec::new(),
        };
        Ok(Self {
            kind,
            params,
            spin,
            exponent_series,
        })
    }

    pub fn kind(&self) -> FieldModelKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spin(&self) -> SpinNumber {
        self.spin
    }

    /// Moment magnitude `g mu_B s` in J/T.
    pub fn moment(&self) -> f64 {
        self.params.g * MU_B * self.spin.s()
    }

    /// `B_z = -(1/(g mu_B s)) dH_eff/du_z` in tesla, with preconditions checked.
    pub fn effective_field(&self, beta: f64, u_z: f64) -> Result<f64> {
        check_uz(u_z)?;
        match self.kind {
            FieldModelKind::ExactLog | FieldModelKind::HighT(_) if !(beta > 0.0) => Err(
                Error::InvalidParameter(format!("beta must be positive, got {beta}")),
            ),
            _ => Ok(self.field_z(beta, u_z)),
        }
    }

    /// Unchecked field evaluation for the integrator's inner loop.
    #[inline]
    pub fn field_z(&self, beta: f64, u_z: f64) -> f64 {
        match self.kind {
            FieldModelKind::ClassicalLimit => {
                let s = self.spin.s();
                (self.params.a1() + (2.0 * s - 1.0) * self.params.a2() * u_z)
                    / (self.params.g * MU_B)
            }
            FieldModelKind::HighT(_) => self.high_t_field(beta, u_z),
            FieldModelKind::ExactLog => self.exact_field(beta, u_z),
        }
    }

    /// Effective energy in joules at `(beta, u_z)`.
    pub fn hamiltonian(&self, beta: f64, u_z: f64) -> Result<f64> {
        match self.kind {
            FieldModelKind::ClassicalLimit => {
                check_uz(u_z)?;
                Ok(classical_hamiltonian(self.spin, &self.params, u_z))
            }
            FieldModelKind::HighT(n) => {
                let coeffs = high_t_hamiltonian_coefficients(self.spin, &self.params, n, u_z)?;
                Ok(TruncatedSeries::new(coeffs)?.eval(beta))
            }
            FieldModelKind::ExactLog => exact_hamiltonian(self.spin, &self.params, beta, u_z),
        }
    }

    /// `B^(j)(u_z)` for `j = 0..=N` (HighT only), each in T J^j.
    pub fn high_t_field_coefficients(&self, u_z: f64) -> Result<Vec<f64>> {
        let FieldModelKind::HighT(n) = self.kind else {
            return Err(Error::InvalidParameter(
                "field coefficients exist only for the high-temperature model".into(),
            ));
        };
        check_uz(u_z)?;
        let mut ratio = [0.0; MAX_HIGH_T_ORDER as usize + 2];
        self.log_weight_slope_series(u_z, &mut ratio);
        let prefactor = 1.0 / (self.params.g * MU_B * self.spin.s());
        Ok((0..=n as usize)
            .map(|j| prefactor * ENERGY_UNIT.powi(j as i32 + 1) * ratio[j + 1])
            .collect())
    }

    /// Series of `d/du ln(L / (1+|z|^2)^(2s))` in `x = beta * ENERGY_UNIT`.
    fn log_weight_slope_series(&self, u_z: f64, ratio: &mut [f64]) {
        const CAP: usize = MAX_TWO_S as usize + 1;
        const LEN: usize = MAX_HIGH_T_ORDER as usize + 2;
        let len = self.exponent_series[0].len();
        let mut weights = [0.0; CAP];
        let mut slopes = [0.0; CAP];
        weights_and_slopes(self.spin.two_s(), u_z, &mut weights, &mut slopes);
        let mut gibbs = [0.0; LEN];
        let mut d_gibbs = [0.0; LEN];
        for (p, e) in self.exponent_series.iter().enumerate() {
            for k in 0..len {
                gibbs[k] += weights[p] * e[k];
                d_gibbs[k] += slopes[p] * e[k];
            }
        }
        series::div_into(&d_gibbs[..len], &gibbs[..len], &mut ratio[..len]);
    }

    fn high_t_field(&self, beta: f64, u_z: f64) -> f64 {
        let mut ratio = [0.0; MAX_HIGH_T_ORDER as usize + 2];
        self.log_weight_slope_series(u_z, &mut ratio);
        let len = self.exponent_series[0].len();
        let x = beta * ENERGY_UNIT;
        // dH/du = -E sum_j x^j R_{j+1}
        let sum = ratio[1..len].iter().rev().fold(0.0, |acc, r| acc * x + r);
        ENERGY_UNIT * sum / (self.params.g * MU_B * self.spin.s())
    }

    fn exact_field(&self, beta: f64, u_z: f64) -> f64 {
        const CAP: usize = MAX_TWO_S as usize + 1;
        let u = u_z.clamp(-1.0 + POLE_CLAMP, 1.0 - POLE_CLAMP);
        let two_s = self.spin.two_s();
        let mut logs = [0.0; CAP];
        let mut max = f64::NEG_INFINITY;
        for p in 0..=two_s {
            let l = log_weight(two_s, p, u) + beta * exponent(self.spin, &self.params, p);
            logs[p as usize] = l;
            max = max.max(l);
        }
        let (mut norm, mut slope) = (0.0, 0.0);
        for p in 0..=two_s {
            let t = (logs[p as usize] - max).exp();
            norm += t;
            slope += t * ((two_s - p) as f64 / (1.0 + u) - p as f64 / (1.0 - u));
        }
        slope / (norm * beta * self.params.g * MU_B * self.spin.s())
    }
}
