//! Plain `key = value` scenario files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigParseError {
    #[error("{source_name}:{line}: expected `key = value`, got `{text}`")]
    Malformed { source_name: String, line: usize, text: String },
    #[error("{source_name}:{line}: unknown key `{key}`")]
    UnknownKey { source_name: String, line: usize, key: String },
    #[error("{source_name}:{line}: key `{key}` given twice")]
    DuplicateKey { source_name: String, line: usize, key: String },
    #[error("{source_name}:{line}: bad value `{value}` for `{key}`: {reason}")]
    BadValue { source_name: String, line: usize, key: String, value: String, reason: String },
    #[error("cannot read scenario {path}: {reason}")]
    Unreadable { path: String, reason: String },
}

/// Initial data used by the `norms`, `evolve`, `picard` and `strichartz`
/// commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Zero,
    Gaussian,
    Random,
    Synthetic,
}

impl FromStr for DataKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zero" => Ok(Self::Zero),
            "gaussian" => Ok(Self::Gaussian),
            "random" => Ok(Self::Random),
            "synthetic" => Ok(Self::Synthetic),
            _ => Err("expected one of zero, gaussian, random, synthetic".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Interpolation,
    PowerLaw,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "interpolation" => Ok(Self::Interpolation),
            "power_law" => Ok(Self::PowerLaw),
            _ => Err("expected interpolation or power_law".into()),
        }
    }
}

/// A time exponent that may be infinite; written as `inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "infinity" => Ok(Self(f64::INFINITY)),
            _ => s.parse::<f64>().map(Self).map_err(|e| e.to_string()),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

/// Fully resolved run parameters. Every output embeds this.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "P")]
    pub period: usize,
    pub alpha: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub cutoff: f64,
    /// End time of `evolve`, `picard` and `strichartz`.
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Fraction of the predicted horizon run by `highlow`.
    #[serde(rename = "T_factor")]
    pub t_factor: f64,
    pub dt: f64,
    pub seed: u64,
    pub s0: f64,
    pub amplitude: f64,
    pub family: Family,
    pub data: DataKind,
    pub q: Exponent,
    pub r: Exponent,
    /// Random fields drawn by `calibrate`.
    pub samples: usize,
    /// Seeds `seed, seed+1, …` run by `highlow`.
    pub replicas: usize,
    /// Snapshot spacing, in steps, of `evolve`.
    pub stride: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            d: 1,
            n: 256,
            period: 4,
            alpha: 3.0,
            p: 2.3,
            cutoff: 8.0,
            t_end: 1.0,
            t_factor: 1.0,
            dt: 1e-3,
            seed: 0,
            s0: 1.5,
            amplitude: 1.0,
            family: Family::Interpolation,
            data: DataKind::Gaussian,
            q: Exponent(f64::INFINITY),
            r: Exponent(2.0),
            samples: 1000,
            replicas: 1,
            stride: 100,
        }
    }
}

pub const KEYS: [&str; 19] = [
    "d",
    "n",
    "P",
    "alpha",
    "p",
    "N",
    "T",
    "T_factor",
    "dt",
    "seed",
    "s0",
    "amplitude",
    "family",
    "data",
    "q",
    "r",
    "samples",
    "replicas",
    "stride",
];

fn parse_value<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| e.to_string())
}

impl Scenario {
    /// Sets one key; `Err` carries the reason a known key's value was rejected,
    /// `Ok(false)` means the key is unknown.
    fn set(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match key {
            "d" => self.d = parse_value(value)?,
            "n" => self.n = parse_value(value)?,
            "P" => self.period = parse_value(value)?,
            "alpha" => self.alpha = parse_value(value)?,
            "p" => self.p = parse_value(value)?,
            "N" => self.cutoff = parse_value(value)?,
            "T" => self.t_end = parse_value(value)?,
            "T_factor" => self.t_factor = parse_value(value)?,
            "dt" => self.dt = parse_value(value)?,
            "seed" => self.seed = parse_value(value)?,
            "s0" => self.s0 = parse_value(value)?,
            "amplitude" => self.amplitude = parse_value(value)?,
            "family" => self.family = parse_value(value)?,
            "data" => self.data = parse_value(value)?,
            "q" => self.q = parse_value(value)?,
            "r" => self.r = parse_value(value)?,
            "samples" => self.samples = parse_value(value)?,
            "replicas" => self.replicas = parse_value(value)?,
            "stride" => self.stride = parse_value(value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, source_name: &str) -> Result<(), ConfigParseError> {
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigParseError::Malformed { source_name: source_name.into(), line, text: body.into() });
            };
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(ConfigParseError::DuplicateKey { source_name: source_name.into(), line, key: key.into() });
            }
            self.apply_pair(key, value, source_name, line)?;
            seen.push(key.to_string());
        }
        Ok(())
    }

    fn apply_pair(&mut self, key: &str, value: &str, source_name: &str, line: usize) -> Result<(), ConfigParseError> {
        match self.set(key, value) {
            Ok(true) => Ok(()),
            Ok(false) => Err(ConfigParseError::UnknownKey { source_name: source_name.into(), line, key: key.into() }),
            Err(reason) => Err(ConfigParseError::BadValue {
                source_name: source_name.into(),
                line,
                key: key.into(),
                value: value.into(),
                reason,
            }),
        }
    }

    /// Applies a `--set key=value` override.
    pub fn apply_override(&mut self, pair: &str) -> Result<(), ConfigParseError> {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(ConfigParseError::Malformed { source_name: "--set".into(), line: 0, text: pair.into() });
        };
        self.apply_pair(key.trim(), value.trim(), "--set", 0)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigParseError> {
        let mut s = Self::default();
        s.apply_text(text, "<scenario>")?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigParseError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigParseError::Unreadable { path: path.display().to_string(), reason: e.to_string() })?;
        let mut s = Self::default();
        s.apply_text(&text, &path.display().to_string())?;
        Ok(s)
    }

    /// `(key, value)` pairs in [`KEYS`] order, formatted as they would be
    /// written in a scenario file.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let family = match self.family {
            Family::Interpolation => "interpolation",
            Family::PowerLaw => "power_law",
        };
        let data = match self.data {
            DataKind::Zero => "zero",
            DataKind::Gaussian => "gaussian",
            DataKind::Random => "random",
            DataKind::Synthetic => "synthetic",
        };
        let values = [
            self.d.to_string(),
            self.n.to_string(),
            self.period.to_string(),
            self.alpha.to_string(),
            self.p.to_string(),
            self.cutoff.to_string(),
            self.t_end.to_string(),
            self.t_factor.to_string(),
            self.dt.to_string(),
            self.seed.to_string(),
            self.s0.to_string(),
            self.amplitude.to_string(),
            family.to_string(),
            data.to_string(),
            self.q.to_string(),
            self.r.to_string(),
            self.samples.to_string(),
            self.replicas.to_string(),
            self.stride.to_string(),
        ];
        KEYS.iter().copied().zip(values).collect()
    }
}
