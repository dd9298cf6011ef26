use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constants::MU_B;
use crate::model::{FieldModel, FieldModelKind, ModelParams, SpinNumber};
use crate::vec3::{norm, normalize, Vec3};
use crate::{Error, Result};

/// Temperatures in kelvin, either listed or generated from a range.
#[derive(Debug, Clone, PartialEq)]
pub enum TemperatureGrid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
        log: bool,
    },
}

impl Default for TemperatureGrid {
    fn default() -> Self {
        TemperatureGrid::Range {
            start: 0.1,
            stop: 100.0,
            points: 60,
            log: true,
        }
    }
}

impl TemperatureGrid {
    pub fn log(start: f64, stop: f64, points: usize) -> Self {
        TemperatureGrid::Range {
            start,
            stop,
            points,
            log: true,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            TemperatureGrid::List(ref v) => v.clone(),
            TemperatureGrid::Range {
                start,
                stop,
                points,
                log,
            } => match points {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..points)
                    .map(|i| {
                        let f = i as f64 / (points - 1) as f64;
                        if i == points - 1 {
                            stop
                        } else if log {
                            (start.ln() + f * (stop.ln() - start.ln())).exp()
                        } else {
                            start + f * (stop - start)
                        }
                    })
                    .collect(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values = self.values();
        if values.is_empty() {
            return Err(Error::Config("temperature grid is empty".into()));
        }
        if let Some(t) = values.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(Error::Config(format!(
                "temperatures must be positive, got {t}"
            )));
        }
        Ok(())
    }
}

/// `a:b:n` (linear) or `a:b:nlog` (logarithmic).
impl FromStr for TemperatureGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "temperature range '{s}' is not of the form a:b:n or a:b:nlog"
            ))
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let (n, log) = match n.strip_suffix("log") {
            Some(n) => (n, true),
            None => (*n, false),
        };
        Ok(TemperatureGrid::Range {
            start: a.trim().parse().map_err(|_| bad())?,
            stop: b.trim().parse().map_err(|_| bad())?,
            points: n.trim().parse().map_err(|_| bad())?,
            log,
        })
    }
}

impl fmt::Display for TemperatureGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemperatureGrid::List(v) => write!(f, "{v:?}"),
            TemperatureGrid::Range {
                start,
                stop,
                points,
                log,
            } => write!(
                f,
                "{start}:{stop}:{points}{}",
                if *log { "log" } else { "" }
            ),
        }
    }
}

impl Serialize for TemperatureGrid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TemperatureGrid::List(v) => v.serialize(serializer),
            range => serializer.collect_str(range),
        }
    }
}

impl<'de> Deserialize<'de> for TemperatureGrid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            List(Vec<f64>),
            Range(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::List(v) => Ok(TemperatureGrid::List(v)),
            Repr::Range(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn default_g() -> f64 {
    crate::constants::G_DEFAULT
}
fn default_mu0_h() -> f64 {
    1.0
}
fn default_model() -> FieldModelKind {
    FieldModelKind::ExactLog
}
fn default_ns() -> usize {
    20
}
fn default_t_equil() -> f64 {
    5.0
}
fn default_t_measure() -> f64 {
    15.0
}
fn default_dt() -> f64 {
    5e-5
}
fn default_alpha() -> f64 {
    0.1
}
fn default_m0() -> Vec3 {
    let c = 1.0 / 3f64.sqrt();
    [c, c, -c]
}
fn default_spin() -> SpinNumber {
    SpinNumber::new(1).unwrap()
}

/// Everything a sweep needs. Times are in nanoseconds.
///
/// `anisotropy` and `strain` are `K` and `lambda sigma` in units of
/// `g mu_B mu0 H`; the `_joules` keys override them with absolute values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_spin")]
    pub two_s: SpinNumber,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_mu0_h")]
    pub mu0_h: f64,
    #[serde(default)]
    pub anisotropy: f64,
    #[serde(default)]
    pub strain: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anisotropy_joules: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strain_joules: Option<f64>,
    #[serde(default = "default_model")]
    pub model: FieldModelKind,
    #[serde(default)]
    pub temperatures: TemperatureGrid,
    #[serde(default = "default_ns")]
    pub ns: usize,
    #[serde(default = "default_t_equil")]
    pub t_equil_ns: f64,
    #[serde(default = "default_t_measure")]
    pub t_measure_ns: f64,
    #[serde(default = "default_dt")]
    pub dt_ns: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_m0")]
    pub m0: Vec3,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            two_s: default_spin(),
            g: default_g(),
            mu0_h: default_mu0_h(),
            anisotropy: 0.0,
            strain: 0.0,
            anisotropy_joules: None,
            strain_joules: None,
            model: default_model(),
            temperatures: TemperatureGrid::default(),
            ns: default_ns(),
            t_equil_ns: default_t_equil(),
            t_measure_ns: default_t_measure(),
            dt_ns: default_dt(),
            alpha: default_alpha(),
            m0: default_m0(),
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Checks invariants and normalises `m0` if it is off the sphere.
    pub fn validated(mut self) -> Result<Self> {
        self.temperatures.validate()?;
        if self.ns == 0 {
            return Err(Error::Config("ns must be at least 1".into()));
        }
        if !(self.dt_ns > 0.0) {
            return Err(Error::Config(format!(
                "dt_ns must be positive, got {}",
                self.dt_ns
            )));
        }
        if !(self.t_equil_ns >= 0.0) || !(self.t_measure_ns > 0.0) {
            return Err(Error::Config(
                "t_equil_ns must be >= 0 and t_measure_ns > 0".into(),
            ));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        let n = norm(self.m0);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Config("m0 must be a nonzero vector".into()));
        }
        if (n - 1.0).abs() > 1e-9 {
            self.m0 = normalize(self.m0);
        }
        self.model_params()?;
        self.field_model()?;
        Ok(self)
    }

    /// `g mu_B mu0 H`, the energy unit for `anisotropy` and `strain`.
    pub fn zeeman_unit(&self) -> f64 {
        self.g * MU_B * self.mu0_h
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        let unit = self.zeeman_unit();
        let k = self.anisotropy_joules.unwrap_or(self.anisotropy * unit);
        let ls = self.strain_joules.unwrap_or(self.strain * unit);
        ModelParams::new(self.g, self.mu0_h, k, ls).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn field_model(&self) -> Result<FieldModel> {
        FieldModel::new(self.model, self.model_params()?, self.two_s)
            .map_err(|e| Error::Config(e.to_string()))
    }
}
