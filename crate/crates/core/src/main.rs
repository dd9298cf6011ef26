use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qparamag::harness::{self, OutputFormat, SweepConfig, TemperatureGrid};
use qparamag::model::SpinNumber;
use qparamag::{validate, Error, FieldModelKind};

#[derive(Parser)]
#[command(
    name = "qparamag",
    version,
    about = "Quantum paramagnet thermal averages from stochastic spin dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run stochastic LLG ensembles over a temperature grid and compare to the exact result.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// classical | hight:N | exact
        #[arg(long)]
        model: Option<FieldModelKind>,
        #[arg(long)]
        two_s: Option<u32>,
        /// a:b:n for a linear grid, a:b:nlog for a logarithmic one (kelvin)
        #[arg(long)]
        temps: Option<TemperatureGrid>,
        #[arg(long)]
        ns: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Exact quantum cumulants only.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Run the built-in consistency checks.
    Validate,
}

fn load_config(path: Option<&PathBuf>) -> Result<SweepConfig, Error> {
    match path {
        Some(p) => SweepConfig::load(p),
        None => Ok(SweepConfig::default()),
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Sweep {
            config,
            model,
            two_s,
            temps,
            ns,
            seed,
            out,
            format,
        } => {
            let mut cfg = load_config(config.as_ref())?;
            if let Some(m) = model {
                cfg.model = m;
            }
            if let Some(n) = two_s {
                cfg.two_s = SpinNumber::new(n).map_err(|e| Error::Config(e.to_string()))?;
            }
            if let Some(t) = temps {
                cfg.temperatures = t;
            }
            if let Some(n) = ns {
                cfg.ns = n;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let result = harness::run_sweep(&cfg)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            harness::emit(&result, &out, format)?;
            eprintln!(
                "{} temperatures, model {}, 2s = {}, {:.1} s -> {}",
                result.rows.len(),
                result.model,
                result.two_s,
                result.wall_time_s,
                out.display()
            );
            Ok(true)
        }
        Command::Oracle {
            config,
            out,
            format,
        } => {
            let cfg = load_config(config.as_ref())?;
            let result = harness::oracle_sweep(&cfg)?;
            harness::emit(&result, &out, format)?;
            Ok(true)
        }
        Command::Validate => {
            let checks = validate::run_checks()?;
            let mut ok = true;
            for c in &checks {
                let status = if c.passed() { "PASS" } else { "FAIL" };
                println!(
                    "[{status}] {:<58} worst {:.3e} (tol {:.0e})",
                    c.name, c.worst, c.tolerance
                );
                ok &= c.passed();
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
