use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::sweep::SweepResult;
use crate::{Error, Result};

pub const CSV_COLUMNS: [&str; 10] = [
    "temperature_K",
    "mean_mz",
    "stderr_mz",
    "oracle_mean_sz_over_s",
    "oracle_var_sz",
    "spin_temp_K",
    "n_s",
    "n_t",
    "model",
    "two_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    temperature_k: f64,
    mean_mz: Option<f64>,
    stderr_mz: Option<f64>,
    oracle_mean_sz_over_s: f64,
    oracle_var_sz: f64,
    spin_temp_k: Option<f64>,
    n_s: usize,
    n_t: u64,
    model: &'a str,
    two_s: u32,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv<W: Write>(result: &SweepResult, out: W) -> std::result::Result<(), csv::Error> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    writer.write_record(CSV_COLUMNS)?;
    let model = result.model.to_string();
    for row in &result.rows {
        writer.serialize(CsvRow {
            temperature_k: row.temperature_k,
            mean_mz: row.mean_mz,
            stderr_mz: row.stderr_mz,
            oracle_mean_sz_over_s: row.oracle_mean_sz_over_s,
            oracle_var_sz: row.oracle_var_sz,
            spin_temp_k: row.spin_temp_k,
            n_s: row.n_s,
            n_t: row.n_t,
            model: &model,
            two_s: result.two_s,
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes `result` to `path`. CSV holds the per-temperature table; JSON
/// holds the full result including the config echo.
pub fn emit(result: &SweepResult, path: &Path, format: OutputFormat) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(result, &mut out).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, result).map_err(|e| Error::Format {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            out.write_all(b"\n").map_err(io_err(path))?;
        }
    }
    out.flush().map_err(io_err(path))
}

pub fn load_json(path: &Path) -> Result<SweepResult> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
