//! Fast self-checks behind `qparamag validate`.
//!
//! Each check compares two independent routes to the same quantity and
//! reports the worst discrepancy against a fixed tolerance.

use crate::constants::{beta, MU_B};
use crate::dynamics::{llg_step_model, stream_rng, LlgParams, MomentState};
use crate::model::{self, reference, FieldModel, FieldModelKind, ModelParams, SpinNumber};
use crate::oracle;
use crate::series::TruncatedSeries;
use crate::vec3::norm;
use crate::Result;

use rand::Rng;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn spin(two_s: u32) -> SpinNumber {
    SpinNumber::new(two_s).expect("two_s within range")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn series_round_trip() -> Result<f64> {
    let mut rng = stream_rng(1, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let mut c: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        c[0] = 0.0;
        let a = TruncatedSeries::new(c)?;
        let back = a.exp(1.0)?.ln()?;
        for (x, y) in back.coeffs().iter().zip(a.coeffs()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

fn appendix_a() -> Result<f64> {
    let mut rng = stream_rng(2, 0);
    let unit = 2.0 * MU_B;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u: f64 = rng.random_range(-1.0..1.0);
        let p = ModelParams::new(
            2.0,
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0) * unit,
            0.0,
        )?;
        for two_s in 1..=4 {
            let h = model::high_t_hamiltonian_coefficients(spin(two_s), &p, 1, u)?;
            worst = worst.max((h[0] - reference::h0_of_uz(two_s, p.a1(), p.a2(), u)).abs() / unit);
            if two_s == 2 {
                worst = worst.max(
                    (h[1] - reference::h1_spin_one_of_uz(p.a1(), p.a2(), u)).abs() / unit.powi(2),
                );
                let field = FieldModel::new(FieldModelKind::HighT(1), p, spin(2))?;
                let b1 = field.high_t_field_coefficients(u)?[1];
                let want = reference::b1_spin_one(p.g, p.a1(), p.a2(), u);
                worst = worst.max((b1 - want).abs() * p.g * MU_B / unit.powi(2));
            }
        }
    }
    Ok(worst)
}

fn appendix_b() -> Result<f64> {
    let mut rng = stream_rng(3, 0);
    let p = ModelParams::new(2.0, 1.0, -2.0 * 2.0 * MU_B, 0.0)?;
    let field = FieldModel::new(FieldModelKind::ExactLog, p, spin(2))?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let b = beta(10f64.powf(rng.random_range(-0.7..1.7)));
        let u = rng.random_range(-0.99..0.99);
        let want = reference::exact_b_spin_one(p.g, p.a1(), p.a2(), b, u);
        worst = worst.max(rel(field.effective_field(b, u)?, want));
    }
    Ok(worst)
}

fn field_finite_difference() -> Result<f64> {
    let p = ModelParams::new(2.0, 1.0, -2.0 * 2.0 * MU_B, 0.0)?;
    let mut worst: f64 = 0.0;
    for kind in [
        FieldModelKind::HighT(1),
        FieldModelKind::HighT(3),
        FieldModelKind::ExactLog,
    ] {
        for two_s in 1..=4 {
            let field = FieldModel::new(kind, p, spin(two_s))?;
            for &t in &[1.0, 10.0] {
                let b = beta(t);
                for &u in &[-0.7, 0.05, 0.6] {
                    let h = 1e-5;
                    let fd = -(field.hamiltonian(b, u + h)? - field.hamiltonian(b, u - h)?)
                        / (2.0 * h)
                        / field.moment();
                    worst = worst.max(rel(field.effective_field(b, u)?, fd));
                }
            }
        }
    }
    Ok(worst)
}

fn oracle_spin_half() -> Result<f64> {
    let unit = 2.0 * MU_B;
    let mut worst: f64 = 0.0;
    for a2 in [0.0, 5.0, -5.0] {
        let p = ModelParams::new(2.0, 1.0, a2 * unit, 0.0)?;
        for i in 0..50 {
            let b = beta(0.05 * 1.2f64.powi(i));
            let want = 0.5 * (b * p.a1() / 2.0).tanh();
            worst = worst.max((oracle::mean_sz(spin(1), &p, b)? - want).abs());
        }
    }
    Ok(worst)
}

fn norm_preservation() -> Result<f64> {
    let p = ModelParams::new(2.0, 1.0, -2.0 * 2.0 * MU_B, 0.0)?;
    let field = FieldModel::new(FieldModelKind::ExactLog, p, spin(2))?;
    let params = LlgParams::for_model(&field, 0.1, 5e-14, 1.0)?;
    let std = params.noise_std()?;
    let mut rng = stream_rng(4, 0);
    let mut state = MomentState::new([1.0, 1.0, -1.0])?;
    for _ in 0..20_000 {
        let noise = [0, 1, 2].map(|_| std * rng.sample::<f64, _>(rand_distr::StandardNormal));
        state = llg_step_model(&state, &field, params.beta(), noise, &params).state;
    }
    Ok((norm(state.m) - 1.0).abs())
}

/// Runs every check. Fails only on internal errors, not on violated tolerances.
pub fn run_checks() -> Result<Vec<Check>> {
    Ok(vec![
        Check {
            name: "series ln(exp(a)) round trip",
            worst: series_round_trip()?,
            tolerance: 1e-12,
        },
        Check {
            name: "classical and first-order coefficients vs closed forms",
            worst: appendix_a()?,
            tolerance: 1e-10,
        },
        Check {
            name: "exact-log spin-1 field vs closed form",
            worst: appendix_b()?,
            tolerance: 1e-10,
        },
        Check {
            name: "field vs central difference",
            worst: field_finite_difference()?,
            tolerance: 1e-6,
        },
        Check {
            name: "spin-1/2 oracle vs tanh",
            worst: oracle_spin_half()?,
            tolerance: 1e-12,
        },
        Check {
            name: "norm drift over 2e4 noisy steps",
            worst: norm_preservation()?,
            tolerance: 1e-9,
        },
    ])
}
