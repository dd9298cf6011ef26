//! Stochastic Landau-Lifshitz-Gilbert dynamics of one unit moment.
//!
//! The equation of motion is
//!
//! ```text
//! dm/dt = -gamma/(1+alpha^2) (m x B + alpha m x (m x B)),   B = B_model(m_z) e_z + eta
//! ```
//!
//! with white noise `<eta_i(t) eta_j(t')> = 2 alpha k_B T / (mu_s gamma) delta_ij delta(t-t')`.
//! Each step uses the implicit midpoint rule in the Stratonovich sense: the
//! noise is drawn once and held over the step, the deterministic field is
//! evaluated at the midpoint, and the midpoint equation is solved by fixed
//! point iteration where every iterate is an exact Cayley rotation. The norm
//! of `m` is therefore preserved to rounding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constants::{beta, HBAR, K_B, MU_B};
use crate::model::FieldModel;
use crate::vec3::{add, cross, dot, norm, normalize, scale, sub, Vec3};
use crate::{Error, Result};

/// Fixed-point tolerance on successive midpoint iterates.
pub const MIDPOINT_TOLERANCE: f64 = 1e-12;
/// Iterations allowed before the step falls back to projected Heun.
pub const MIDPOINT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlgParams {
    /// Gilbert damping.
    pub alpha: f64,
    /// Gyromagnetic ratio in rad/(s T).
    pub gamma: f64,
    /// Moment magnitude in J/T.
    pub mu_s: f64,
    /// Timestep in seconds.
    pub dt: f64,
    /// Bath temperature in kelvin.
    pub temperature: f64,
    /// Whether the thermal field is applied.
    pub thermal: bool,
}

impl LlgParams {
    pub fn new(alpha: f64, gamma: f64, mu_s: f64, dt: f64, temperature: f64) -> Result<Self> {
        let p = Self {
            alpha,
            gamma,
            mu_s,
            dt,
            temperature,
            thermal: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// `gamma = g mu_B / hbar`, `mu_s = g mu_B s` taken from the field model.
    pub fn for_model(model: &FieldModel, alpha: f64, dt: f64, temperature: f64) -> Result<Self> {
        let g = model.params().g;
        Self::new(alpha, g * MU_B / HBAR, model.moment(), dt, temperature)
    }

    /// Same parameters without the thermal field.
    pub fn deterministic(mut self) -> Self {
        self.thermal = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.gamma > 0.0) || !(self.mu_s > 0.0) {
            return Err(Error::InvalidParameter(
                "gamma and mu_s must be positive".into(),
            ));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        beta(self.temperature)
    }

    /// Per-component standard deviation of the discretised thermal field, tesla.
    pub fn noise_std(&self) -> Result<f64> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(
                "thermal noise requires alpha > 0".into(),
            ));
        }
        self.validate()?;
        Ok((2.0 * self.alpha * K_B * self.temperature / (self.mu_s * self.gamma * self.dt)).sqrt())
    }

    /// Characteristic relaxation time `(1 + alpha^2) / (alpha gamma |B|)` for a field `b`.
    pub fn relaxation_time(&self, b: f64) -> f64 {
        (1.0 + self.alpha * self.alpha) / (self.alpha * self.gamma * b.abs())
    }
}

/// Deterministic per-trajectory generator: one ChaCha stream per index.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw of the thermal field, i.i.d. Gaussian per component.
pub fn noise_sample<R: Rng + ?Sized>(params: &LlgParams, rng: &mut R) -> Result<Vec3> {
    let std = params.noise_std()?;
    Ok(draw(std, rng))
}

#[inline]
fn draw<R: Rng + ?Sized>(std: f64, rng: &mut R) -> Vec3 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    let z: f64 = rng.sample(StandardNormal);
    [x * std, y * std, z * std]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub m: Vec3,
    pub t: f64,
}

impl MomentState {
    pub fn new(m: Vec3) -> Result<Self> {
        let n = norm(m);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(
                "initial moment must be nonzero".into(),
            ));
        }
        Ok(Self {
            m: normalize(m),
            t: 0.0,
        })
    }
}

/// Outcome of one step: the new state and whether the midpoint solve converged.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub state: MomentState,
    pub converged: bool,
}

/// Solves `x + a x x = b` for `x`.
#[inline]
fn cayley_solve(a: Vec3, b: Vec3) -> Vec3 {
    let ab = cross(a, b);
    let k = dot(a, b);
    scale(add(sub(b, ab), scale(a, k)), 1.0 / (1.0 + dot(a, a)))
}

/// LLG right-hand side `-gamma' (m x B + alpha m x (m x B))`.
#[inline]
fn llg_rhs(m: Vec3, b: Vec3, gamma_eff: f64, alpha: f64) -> Vec3 {
    let mxb = cross(m, b);
    scale(add(mxb, scale(cross(m, mxb), alpha)), -gamma_eff)
}

/// Generic implicit-midpoint step with a field that depends on the direction.
fn midpoint_step(m: Vec3, params: &LlgParams, field: impl Fn(Vec3) -> Vec3) -> (Vec3, bool) {
    let gamma_eff = params.gamma / (1.0 + params.alpha * params.alpha);
    let half_dt = 0.5 * params.dt;
    let mut next = m;
    for _ in 0..MIDPOINT_MAX_ITER {
        let mid = scale(add(m, next), 0.5);
        let unit = scale(mid, 1.0 / norm(mid));
        let b = field(unit);
        // m x (B + alpha m x B) written as mid x omega
        let omega = scale(add(b, scale(cross(unit, b), params.alpha)), -gamma_eff);
        let a = scale(omega, half_dt);
        let rhs = sub(m, cross(a, m));
        let candidate = cayley_solve(a, rhs);
        let change = norm(sub(candidate, next));
        next = candidate;
        if change < MIDPOINT_TOLERANCE {
            return (next, true);
        }
    }

    // Projected Heun fallback.
    let k1 = llg_rhs(m, field(m), gamma_eff, params.alpha);
    let predictor = normalize(add(m, scale(k1, params.dt)));
    let k2 = llg_rhs(predictor, field(predictor), gamma_eff, params.alpha);
    (normalize(add(m, scale(add(k1, k2), half_dt))), false)
}

/// One step under a field held fixed over the step.
pub fn llg_step(state: &MomentState, field: Vec3, params: &LlgParams) -> StepOutcome {
    let (m, converged) = midpoint_step(state.m, params, |_| field);
    StepOutcome {
        state: MomentState {
            m,
            t: state.t + params.dt,
        },
        converged,
    }
}

/// One step under `B_model(m_z) e_z + noise`, model field taken at the midpoint.
pub fn llg_step_model(
    state: &MomentState,
    model: &FieldModel,
    beta: f64,
    noise: Vec3,
    params: &LlgParams,
) -> StepOutcome {
    let (m, converged) = midpoint_step(state.m, params, |u| {
        [noise[0], noise[1], noise[2] + model.field_z(beta, u[2])]
    });
    StepOutcome {
        state: MomentState {
            m,
            t: state.t + params.dt,
        },
        converged,
    }
}

/// Running estimator `T_s = mu_s / (2 k_B) * sum |m x B|^2 / sum m.B`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpinTemperature {
    torque_sq: f64,
    alignment: f64,
    magnitude: f64,
}

impl SpinTemperature {
    pub fn push(&mut self, m: Vec3, b: Vec3) {
        self.torque_sq += dot(cross(m, b), cross(m, b));
        self.alignment += dot(m, b);
        self.magnitude += norm(b);
    }

    pub fn merge(&mut self, other: &Self) {
        self.torque_sq += other.torque_sq;
        self.alignment += other.alignment;
        self.magnitude += other.magnitude;
    }

    pub fn value(&self, mu_s: f64) -> Result<f64> {
        if !(self.alignment.abs() > 1e-12 * self.magnitude) {
            return Err(Error::VanishingDenominator);
        }
        Ok(mu_s / (2.0 * K_B) * self.torque_sq / self.alignment)
    }
}

/// Spin temperature of a set of `(m, B_deterministic)` samples, kelvin.
pub fn spin_temperature(samples: &[(Vec3, Vec3)], mu_s: f64) -> Result<f64> {
    let mut acc = SpinTemperature::default();
    for &(m, b) in samples {
        acc.push(m, b);
    }
    acc.value(mu_s)
}

/// Time averages of one trajectory over its measurement window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStats {
    pub mean_mz: f64,
    pub mean_mz2: f64,
    pub samples: u64,
    /// `None` when the estimator's denominator vanished.
    pub spin_temperature: Option<f64>,
    /// Steps where the midpoint solve did not converge.
    pub fallback_steps: u64,
    pub final_state: MomentState,
}

/// Integrates `t_equil` seconds discarding samples, then accumulates `m_z`
/// at every step of `t_measure`.
pub fn run_trajectory<R: Rng + ?Sized>(
    model: &FieldModel,
    params: &LlgParams,
    m0: Vec3,
    t_equil: f64,
    t_measure: f64,
    rng: &mut R,
) -> Result<TrajectoryStats> {
    if !(t_equil >= 0.0) || !(t_measure >= 0.0) {
        return Err(Error::InvalidParameter(
            "durations must be non-negative".into(),
        ));
    }
    let n_equil = (t_equil / params.dt).round() as u64;
    let n_measure = (t_measure / params.dt).round() as u64;
    if n_measure == 0 {
        return Err(Error::EmptyMeasurement);
    }
    let std = if params.thermal {
        params.noise_std()?
    } else {
        0.0
    };
    let beta = params.beta();

    let mut state = MomentState::new(m0)?;
    let mut fallback_steps = 0u64;
    let mut step = |state: &MomentState, rng: &mut R| {
        let noise = if params.thermal {
            draw(std, rng)
        } else {
            [0.0; 3]
        };
        let out = llg_step_model(state, model, beta, noise, params);
        if !out.converged {
            fallback_steps += 1;
        }
        out.state
    };

    for _ in 0..n_equil {
        state = step(&state, rng);
    }
    let (mut sum, mut sum2) = (0.0, 0.0);
    let mut spin_t = SpinTemperature::default();
    for _ in 0..n_measure {
        state = step(&state, rng);
        let mz = state.m[2];
        sum += mz;
        sum2 += mz * mz;
        spin_t.push(state.m, [0.0, 0.0, model.field_z(beta, mz)]);
    }
    if fallback_steps > 0 {
        log::warn!(
            "{fallback_steps} of {} steps fell back to projected Heun",
            n_equil + n_measure
        );
    }
    let n = n_measure as f64;
    Ok(TrajectoryStats {
        mean_mz: sum / n,
        mean_mz2: sum2 / n,
        samples: n_measure,
        spin_temperature: spin_t.value(params.mu_s).ok(),
        fallback_steps,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MU_B;
    use crate::model::{FieldModelKind, ModelParams, SpinNumber};
    use std::f64::consts::PI;

    fn zeeman_model(kind: FieldModelKind, two_s: u32, mu0_h: f64) -> FieldModel {
        let p = ModelParams::new(2.0, mu0_h, 0.0, 0.0).unwrap();
        FieldModel::new(kind, p, SpinNumber::new(two_s).unwrap()).unwrap()
    }

    fn spin_half_params(alpha: f64, t: f64) -> LlgParams {
        let model = zeeman_model(FieldModelKind::ClassicalLimit, 1, 1.0);
        LlgParams::for_model(&model, alpha, 5e-14, t).unwrap()
    }

    #[test]
    fn noise_variance_matches_fluctuation_dissipation() {
        let params = spin_half_params(0.1, 1.0);
        assert_eq!(params.gamma, 2.0 * MU_B / HBAR);
        assert!((params.gamma / 1.76e11 - 1.0).abs() < 2e-3);
        assert!((params.mu_s - MU_B).abs() < 1e-35);
        let want = 2.0 * 0.1 * K_B * 1.0 / (params.mu_s * params.gamma * params.dt);
        assert!((params.noise_std().unwrap().powi(2) - want).abs() < 1e-12 * want);

        let mut rng = stream_rng(7, 0);
        let n = 1_000_000;
        let mut sums = [0.0; 3];
        for _ in 0..n {
            let eta = noise_sample(&params, &mut rng).unwrap();
            for i in 0..3 {
                sums[i] += eta[i] * eta[i];
            }
        }
        for s in sums {
            let var = s / n as f64;
            assert!((var / want - 1.0).abs() < 0.01, "{var} vs {want}");
        }
    }

    #[test]
    fn doubling_alpha_doubles_noise_variance() {
        let sample_var = |alpha: f64| {
            let params = spin_half_params(alpha, 1.0);
            let mut rng = stream_rng(11, 3);
            let n = 1_000_000;
            (0..n)
                .map(|_| noise_sample(&params, &mut rng).unwrap()[0].powi(2))
                .sum::<f64>()
                / n as f64
        };
        let ratio = sample_var(0.2) / sample_var(0.1);
        assert!((ratio - 2.0).abs() < 0.04, "{ratio}");
    }

    #[test]
    fn noise_vanishes_with_temperature() {
        let hot = spin_half_params(0.1, 1.0).noise_std().unwrap();
        let cold = spin_half_params(0.1, 1e-14).noise_std().unwrap();
        assert!(cold < 1e-6 * hot);
    }

    #[test]
    fn noise_preconditions() {
        let mut rng = stream_rng(0, 0);
        let mut p = spin_half_params(0.1, 1.0);
        p.alpha = 0.0;
        assert!(noise_sample(&p, &mut rng).is_err());
        assert!(LlgParams::new(0.1, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(LlgParams::new(0.1, 1.0, 1.0, 1e-14, 0.0).is_err());
        assert!(LlgParams::new(0.1, 1.0, 1.0, 1e-14, -3.0).is_err());
    }

    #[test]
    fn larmor_precession() {
        let mut params = spin_half_params(0.0, 1.0).deterministic();
        let b0 = 1.0;
        let t_quarter = PI / 2.0 / (params.gamma * b0);
        let steps = 20_000;
        params.dt = t_quarter / steps as f64;
        let theta: f64 = 1.1;
        let mut state = MomentState::new([theta.sin(), 0.0, theta.cos()]).unwrap();
        for _ in 0..steps {
            let out = llg_step(&state, [0.0, 0.0, b0], &params);
            assert!(out.converged);
            state = out.state;
        }
        // dm/dt = -gamma m x B rotates x towards +y for B along +z.
        let want = [0.0, theta.sin(), theta.cos()];
        for (got, want) in state.m.iter().zip(want) {
            assert!((got - want).abs() < 1e-6, "{:?}", state.m);
        }
    }

    #[test]
    fn zero_field_leaves_moment_unchanged() {
        let params = spin_half_params(0.3, 1.0);
        let state = MomentState::new([0.2, -0.5, 0.7]).unwrap();
        let out = llg_step(&state, [0.0; 3], &params);
        assert_eq!(out.state.m, state.m);
    }

    #[test]
    fn damped_relaxation_follows_closed_form() {
        // For constant B along z, tan(theta/2) = tan(theta0/2) exp(-t/tau),
        // tau = (1 + alpha^2) / (alpha gamma B). The midpoint rule is second
        // order, so halving dt must cut the error by four.
        let b0 = 1.0;
        let theta0: f64 = 2.5;
        let error_at = |dt: f64, t_over_tau: f64| {
            let mut params = spin_half_params(0.1, 1.0).deterministic();
            params.dt = dt;
            let tau = params.relaxation_time(b0);
            let n = (t_over_tau * tau / dt).round() as usize;
            let mut state = MomentState::new([theta0.sin(), 0.0, theta0.cos()]).unwrap();
            for _ in 0..n {
                state = llg_step(&state, [0.0, 0.0, b0], &params).state;
            }
            let t = n as f64 * dt;
            let half = ((theta0 / 2.0).tan() * (-t / tau).exp()).atan();
            (state.m[2] - (2.0 * half).cos()).abs()
        };
        for t_over_tau in [0.5, 2.0, 10.0] {
            let coarse = error_at(5e-14, t_over_tau);
            assert!(coarse < 5e-5, "t/tau={t_over_tau}: {coarse}");
            if t_over_tau < 5.0 {
                let ratio = coarse / error_at(2.5e-14, t_over_tau);
                assert!(
                    (ratio - 4.0).abs() < 0.2,
                    "t/tau={t_over_tau}: ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn norm_is_preserved_over_long_noisy_runs() {
        let model = zeeman_model(FieldModelKind::ExactLog, 2, 1.0);
        let params = LlgParams::for_model(&model, 0.1, 5e-14, 2.0).unwrap();
        let std = params.noise_std().unwrap();
        let mut rng = stream_rng(3, 1);
        let mut state = MomentState::new([1.0, 1.0, -1.0]).unwrap();
        for _ in 0..400_000 {
            let prev = norm(state.m);
            state =
                llg_step_model(&state, &model, params.beta(), draw(std, &mut rng), &params).state;
            assert!((norm(state.m) - prev).abs() < 1e-9);
        }
        assert!((norm(state.m) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn undamped_precession_conserves_model_energy() {
        let p = ModelParams::new(2.0, 1.0, -2.0 * 2.0 * MU_B, 0.0).unwrap();
        let model =
            FieldModel::new(FieldModelKind::ExactLog, p, SpinNumber::new(2).unwrap()).unwrap();
        let params = LlgParams::for_model(&model, 0.0, 5e-14, 1.5)
            .unwrap()
            .deterministic();
        let b = params.beta();
        let mut state = MomentState::new([0.6, 0.0, 0.8]).unwrap();
        let e0 = model.hamiltonian(b, state.m[2]).unwrap();
        for _ in 0..100_000 {
            state = llg_step_model(&state, &model, b, [0.0; 3], &params).state;
        }
        assert!((state.m[2] - 0.8).abs() < 1e-10);
        let e1 = model.hamiltonian(b, state.m[2]).unwrap();
        assert!((e1 - e0).abs() <= 1e-8 * e0.abs());
    }

    #[test]
    fn spin_temperature_examples() {
        let mu_s = MU_B;
        let parallel: Vec<_> = (0..10)
            .map(|_| ([0.0, 0.0, 1.0], [0.0, 0.0, 2.0]))
            .collect();
        assert_eq!(spin_temperature(&parallel, mu_s).unwrap(), 0.0);
        assert!(matches!(
            spin_temperature(&[([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])], mu_s),
            Err(Error::VanishingDenominator)
        ));
        assert!(spin_temperature(&[], mu_s).is_err());

        // Noiseless relaxation ends aligned with the field.
        let model = zeeman_model(FieldModelKind::ClassicalLimit, 1, 1.0);
        let params = LlgParams::for_model(&model, 0.5, 5e-14, 1.0)
            .unwrap()
            .deterministic();
        let mut rng = stream_rng(0, 0);
        let stats =
            run_trajectory(&model, &params, [1.0, 1.0, -1.0], 2e-9, 1e-10, &mut rng).unwrap();
        assert!(stats.spin_temperature.unwrap().abs() < 1e-6);
    }

    #[test]
    fn spin_temperature_tracks_the_bath() {
        let model = zeeman_model(FieldModelKind::ClassicalLimit, 1, 1.0);
        let params = LlgParams::for_model(&model, 0.1, 5e-14, 5.0).unwrap();
        let mut acc = SpinTemperature::default();
        // The denominator <m.B> is small at 5 K, so the estimator needs long runs.
        for i in 0..16 {
            let mut rng = stream_rng(21, i);
            let mut state = MomentState::new([1.0, 1.0, -1.0]).unwrap();
            let std = params.noise_std().unwrap();
            for k in 0..2_000_000 {
                state = llg_step_model(&state, &model, params.beta(), draw(std, &mut rng), &params)
                    .state;
                if k >= 40_000 {
                    acc.push(
                        state.m,
                        [0.0, 0.0, model.field_z(params.beta(), state.m[2])],
                    );
                }
            }
        }
        let t = acc.value(params.mu_s).unwrap();
        assert!((t / 5.0 - 1.0).abs() < 0.1, "spin temperature {t}");
    }

    #[test]
    fn trajectory_examples() {
        let model = zeeman_model(FieldModelKind::ClassicalLimit, 1, 1.0);
        let params = LlgParams::for_model(&model, 0.1, 5e-14, 1e-9).unwrap();
        let mut rng = stream_rng(1, 0);
        assert!(matches!(
            run_trajectory(&model, &params, [0.0, 0.0, 1.0], 1e-9, 0.0, &mut rng),
            Err(Error::EmptyMeasurement)
        ));
        let stats =
            run_trajectory(&model, &params, [1.0, 1.0, -1.0], 2e-9, 1e-9, &mut rng).unwrap();
        assert!((stats.mean_mz - 1.0).abs() < 1e-3, "{}", stats.mean_mz);
        assert_eq!(stats.samples, 20_000);
        assert_eq!(stats.fallback_steps, 0);
    }

    #[test]
    fn identical_seeds_give_identical_statistics() {
        let model = zeeman_model(FieldModelKind::HighT(2), 3, 1.0);
        let params = LlgParams::for_model(&model, 0.1, 5e-14, 3.0).unwrap();
        let run = |seed, stream| {
            let mut rng = stream_rng(seed, stream);
            run_trajectory(&model, &params, [1.0, 1.0, -1.0], 1e-10, 5e-10, &mut rng).unwrap()
        };
        let a = run(5, 9);
        assert_eq!(a, run(5, 9));
        assert_ne!(a.mean_mz, run(5, 10).mean_mz);
    }
}
