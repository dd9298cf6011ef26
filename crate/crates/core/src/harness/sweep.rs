use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::constants::beta;
use crate::dynamics::{run_trajectory, stream_rng, LlgParams};
use crate::model::{validity_scale, FieldModel, FieldModelKind};
use crate::oracle;
use crate::parallel::{try_map_indices, Execution};
use crate::{Error, Result};

const NS: f64 = 1e-9;

/// Ensemble statistics at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub temperature_k: f64,
    /// `(1 / N_s N_t) sum_i sum_j m_z^(i)(t_j)`.
    pub mean_mz: f64,
    /// Standard error from the `N_s` per-realisation means (0 when `N_s = 1`).
    pub stderr_mz: f64,
    /// Mean of the per-realisation spin temperatures, when defined.
    pub spin_temp_k: Option<f64>,
    pub n_s: usize,
    pub n_t: u64,
    pub fallback_steps: u64,
}

/// One row of a sweep: dynamics columns are absent for oracle-only sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub temperature_k: f64,
    pub mean_mz: Option<f64>,
    pub stderr_mz: Option<f64>,
    pub oracle_mean_sz_over_s: f64,
    pub oracle_var_sz: f64,
    pub spin_temp_k: Option<f64>,
    pub n_s: usize,
    pub n_t: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub model: FieldModelKind,
    pub two_s: u32,
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
    pub config: SweepConfig,
    pub code_version: String,
    pub wall_time_s: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stream id for realisation `i` at temperature `t`: high bits from the
/// temperature, low 32 bits from the realisation index.
fn stream_id(temperature: f64, realisation: usize) -> u64 {
    (splitmix64(temperature.to_bits()) & !0xFFFF_FFFF) | realisation as u64
}

fn oracle_row(config: &SweepConfig, t: f64) -> Result<SweepRow> {
    let params = config.model_params()?;
    let b = beta(t);
    let spin = config.two_s;
    Ok(SweepRow {
        temperature_k: t,
        mean_mz: None,
        stderr_mz: None,
        oracle_mean_sz_over_s: oracle::mean_sz(spin, &params, b)? / spin.s(),
        oracle_var_sz: oracle::var_sz(spin, &params, b)?,
        spin_temp_k: None,
        n_s: 0,
        n_t: 0,
    })
}

/// Runs `N_s` independent trajectories at `temperature` and averages them.
pub fn ensemble_average(config: &SweepConfig, temperature: f64) -> Result<PointStats> {
    ensemble_with(
        config,
        &config.field_model()?,
        temperature,
        Execution::Parallel,
    )
}

fn ensemble_with(
    config: &SweepConfig,
    model: &FieldModel,
    temperature: f64,
    exec: Execution,
) -> Result<PointStats> {
    let params = LlgParams::for_model(model, config.alpha, config.dt_ns * NS, temperature)?;
    let runs = try_map_indices(config.ns, exec, |i| {
        let mut rng = stream_rng(config.seed, stream_id(temperature, i));
        run_trajectory(
            model,
            &params,
            config.m0,
            config.t_equil_ns * NS,
            config.t_measure_ns * NS,
            &mut rng,
        )
    })
    .map_err(|e| Error::Integration(format!("T = {temperature} K: {e}")))?;

    let n = runs.len() as f64;
    let mean = runs.iter().map(|r| r.mean_mz).sum::<f64>() / n;
    let stderr = if runs.len() > 1 {
        let var = runs.iter().map(|r| (r.mean_mz - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let spin_temps: Vec<f64> = runs.iter().filter_map(|r| r.spin_temperature).collect();
    let spin_temp_k =
        (!spin_temps.is_empty()).then(|| spin_temps.iter().sum::<f64>() / spin_temps.len() as f64);
    Ok(PointStats {
        temperature_k: temperature,
        mean_mz: mean,
        stderr_mz: stderr,
        spin_temp_k,
        n_s: runs.len(),
        n_t: runs[0].samples,
        fallback_steps: runs.iter().map(|r| r.fallback_steps).sum(),
    })
}

/// Dynamics plus oracle over the whole temperature grid.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(config, Execution::Parallel)
}

pub fn run_sweep_with(config: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    let start = Instant::now();
    let config = config.clone().validated()?;
    let model = config.field_model()?;
    let temps = config.temperatures.values();

    let mut warnings = Vec::new();
    if let FieldModelKind::HighT(n) = config.model {
        let scale = validity_scale(config.two_s, model.params());
        for &t in temps.iter().filter(|&&t| t < scale) {
            let msg = format!(
                "T = {t:.4} K is below the validity scale {scale:.4} K of the order-{n} expansion"
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }

    let rows = try_map_indices(temps.len(), exec, |i| {
        let t = temps[i];
        let stats = ensemble_with(&config, &model, t, exec)?;
        if stats.fallback_steps > 0 {
            log::warn!(
                "T = {t} K: {} midpoint steps fell back to Heun",
                stats.fallback_steps
            );
        }
        let mut row = oracle_row(&config, t)?;
        row.mean_mz = Some(stats.mean_mz);
        row.stderr_mz = Some(stats.stderr_mz);
        row.spin_temp_k = stats.spin_temp_k;
        row.n_s = stats.n_s;
        row.n_t = stats.n_t;
        Ok::<_, Error>(row)
    })?;

    Ok(SweepResult {
        model: config.model,
        two_s: config.two_s.two_s(),
        rows,
        warnings,
        config,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Oracle columns only; deterministic and independent of the seed.
pub fn oracle_sweep(config: &SweepConfig) -> Result<SweepResult> {
    let start = Instant::now();
    let config = config.clone().validated()?;
    let rows = config
        .temperatures
        .values()
        .into_iter()
        .map(|t| oracle_row(&config, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        model: config.model,
        two_s: config.two_s.two_s(),
        rows,
        warnings: Vec::new(),
        config,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
