//! JSON scenario and sweep descriptions.
//!
//! All times and frequencies are absolute. `k_x` defaults to 1, so with the
//! default the frequency unit is `ω_x` and the time unit `1/ω_x`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::InitialConditionSpec;
use crate::model::ModelParams;

pub const DEFAULT_PRECISION: u32 = 12;

fn default_k_x() -> f64 {
    1.0
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn is_default_precision(p: &u32) -> bool {
    *p == DEFAULT_PRECISION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "default_k_x")]
    pub k_x: f64,
    pub k_y: f64,
    /// Required without a schedule, forbidden with one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub samples: usize,
    pub spacing: Spacing,
    /// First sample; defaults to 0 for linear spacing, required for log spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
}

impl TimeGrid {
    /// Sample times in ascending order. A single sample sits at `t_max`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        let lo = self.t_min.unwrap_or(0.0);
        if n == 1 {
            return vec![self.t_max];
        }
        let last = (n - 1) as f64;
        match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| if i == n - 1 { self.t_max } else { lo + (self.t_max - lo) * i as f64 / last })
                .collect(),
            Spacing::Log => {
                let (a, b) = (lo.ln(), self.t_max.ln());
                (0..n)
                    .map(|i| match i {
                        0 => lo,
                        _ if i == n - 1 => self.t_max,
                        _ => (a + (b - a) * i as f64 / last).exp(),
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub duration: f64,
    pub omega: f64,
}

/// Quantities a time series can report, besides `t`, `omega` and `saturated`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Output {
    #[serde(rename = "f")]
    F,
    #[serde(rename = "S")]
    Entropy,
    #[serde(rename = "S2")]
    LinearEntropy,
    #[serde(rename = "renyi")]
    Renyi(f64),
    #[serde(rename = "lz")]
    Lz,
    #[serde(rename = "regime")]
    Regime,
}

impl Output {
    pub fn column(&self) -> String {
        match self {
            Output::F => "f".into(),
            Output::Entropy => "S".into(),
            Output::LinearEntropy => "S2".into(),
            Output::Renyi(a) => format!("renyi_{a}"),
            Output::Lz => "lz".into(),
            Output::Regime => "regime".into(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Output::F => 0,
            Output::Entropy => 1,
            Output::LinearEntropy => 2,
            Output::Renyi(_) => 3,
            Output::Lz => 4,
            Output::Regime => 5,
        }
    }
}

fn default_outputs() -> Vec<Output> {
    vec![Output::F, Output::Entropy, Output::LinearEntropy, Output::Lz, Output::Regime]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: ParamsConfig,
    pub initial: InitialConditionSpec,
    pub time_grid: TimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<Segment>>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default = "default_precision", skip_serializing_if = "is_default_precision")]
    pub precision: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// A grid axis or a single fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisOrValue {
    Value(f64),
    Axis(Axis),
}

impl AxisOrValue {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisOrValue::Value(v) => vec![*v],
            AxisOrValue::Axis(a) => a.values(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    Regime,
    /// Real and imaginary parts of `λ₊` and `λ₋`.
    Lambda,
    F,
    #[serde(rename = "S")]
    Entropy,
}

fn default_sweep_outputs() -> Vec<SweepOutput> {
    vec![SweepOutput::Regime, SweepOutput::Lambda]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_k_x")]
    pub k_x: f64,
    /// `k_y/k_x`.
    pub ratio: AxisOrValue,
    pub omega: AxisOrValue,
    /// Evaluation time for `f` and `S`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_eval: Option<f64>,
    pub initial: InitialConditionSpec,
    #[serde(default = "default_sweep_outputs")]
    pub outputs: Vec<SweepOutput>,
    #[serde(default = "default_precision", skip_serializing_if = "is_default_precision")]
    pub precision: u32,
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(if path == "." { "$".into() } else { path }, e.into_inner().to_string())
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be finite, got {v}")))
    }
}

fn check_precision(p: u32) -> Result<()> {
    if (1..=17).contains(&p) {
        Ok(())
    } else {
        Err(Error::config("precision", format!("must be between 1 and 17 significant digits, got {p}")))
    }
}

fn check_initial(spec: &InitialConditionSpec, k_x: f64, k_y: f64) -> Result<()> {
    spec.alphas(k_x, k_y).map(|_| ()).map_err(|e| Error::config("initial", e.to_string()))
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        finite("params.k_x", p.k_x)?;
        finite("params.k_y", p.k_y)?;
        match (&self.schedule, p.omega) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "params.omega",
                    "must be absent when a schedule sets the frequency",
                ))
            }
            (None, None) => return Err(Error::config("params.omega", "required without a schedule")),
            (None, Some(w)) => finite("params.omega", w)?,
            (Some(segments), None) => {
                if segments.is_empty() {
                    return Err(Error::config("schedule", "must contain at least one segment"));
                }
                for (i, s) in segments.iter().enumerate() {
                    if !(s.duration.is_finite() && s.duration > 0.0) {
                        return Err(Error::config(
                            format!("schedule[{i}].duration"),
                            format!("must be positive and finite, got {}", s.duration),
                        ));
                    }
                    finite(&format!("schedule[{i}].omega"), s.omega)?;
                }
            }
        }
        check_initial(&self.initial, p.k_x, p.k_y)?;

        let g = &self.time_grid;
        if !(g.t_max.is_finite() && g.t_max >= 0.0) {
            return Err(Error::config("time_grid.t_max", format!("must be finite and non-negative, got {}", g.t_max)));
        }
        if g.samples == 0 {
            return Err(Error::config("time_grid.samples", "must be positive"));
        }
        match (g.spacing, g.t_min) {
            (Spacing::Log, None) => {
                return Err(Error::config("time_grid.t_min", "required for log spacing"));
            }
            (Spacing::Log, Some(lo)) if !(lo.is_finite() && lo > 0.0) => {
                return Err(Error::config("time_grid.t_min", format!("must be positive for log spacing, got {lo}")));
            }
            (_, Some(lo)) if !(lo.is_finite() && lo >= 0.0 && lo <= g.t_max) => {
                return Err(Error::config("time_grid.t_min", format!("must lie in [0, t_max], got {lo}")));
            }
            _ => {}
        }
        if let Some(segments) = &self.schedule {
            let total: f64 = segments.iter().map(|s| s.duration).sum();
            if g.t_max > total * (1.0 + 1e-12) {
                return Err(Error::config(
                    "time_grid.t_max",
                    format!("exceeds the total schedule duration {total}"),
                ));
            }
        }

        if self.outputs.is_empty() {
            return Err(Error::config("outputs", "must request at least one quantity"));
        }
        for (i, o) in self.outputs.iter().enumerate() {
            if let Output::Renyi(a) = o {
                if !(a.is_finite() && *a > 0.0) || *a == 1.0 {
                    return Err(Error::config(
                        format!("outputs[{i}].renyi"),
                        format!("index must be positive and different from 1, got {a}"),
                    ));
                }
            }
        }
        check_precision(self.precision)
    }

    /// Requested quantities in column order, duplicates removed.
    pub fn ordered_outputs(&self) -> Vec<Output> {
        let mut out = self.outputs.clone();
        out.sort_by(|a, b| {
            a.rank().cmp(&b.rank()).then_with(|| match (a, b) {
                (Output::Renyi(x), Output::Renyi(y)) => x.total_cmp(y),
                _ => std::cmp::Ordering::Equal,
            })
        });
        out.dedup();
        out
    }

    /// `(start, end, params)` of each piece of constant frequency.
    pub fn segments(&self) -> Result<Vec<(f64, f64, ModelParams)>> {
        let p = &self.params;
        match &self.schedule {
            None => {
                let params = ModelParams::new(p.k_x, p.k_y, p.omega.unwrap_or(0.0))?;
                Ok(vec![(0.0, f64::INFINITY, params)])
            }
            Some(segments) => {
                let mut start = 0.0;
                let mut out = Vec::with_capacity(segments.len());
                for s in segments {
                    let end = start + s.duration;
                    out.push((start, end, ModelParams::new(p.k_x, p.k_y, s.omega)?));
                    start = end;
                }
                Ok(out)
            }
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        finite("k_x", self.k_x)?;
        for (name, axis) in [("ratio", &self.ratio), ("omega", &self.omega)] {
            match axis {
                AxisOrValue::Value(v) => finite(name, *v)?,
                AxisOrValue::Axis(a) => {
                    finite(&format!("{name}.min"), a.min)?;
                    finite(&format!("{name}.max"), a.max)?;
                    if a.points < 2 {
                        return Err(Error::config(format!("{name}.points"), format!("must be at least 2, got {}", a.points)));
                    }
                }
            }
        }
        let needs_state = self
            .outputs
            .iter()
            .any(|o| matches!(o, SweepOutput::F | SweepOutput::Entropy));
        match self.t_eval {
            Some(t) if !(t.is_finite() && t >= 0.0) => {
                return Err(Error::config("t_eval", format!("must be finite and non-negative, got {t}")));
            }
            None if needs_state => {
                return Err(Error::config("t_eval", "required when f or S is requested"));
            }
            _ => {}
        }
        if self.outputs.is_empty() {
            return Err(Error::config("outputs", "must request at least one quantity"));
        }
        if needs_state {
            for r in self.ratio.values() {
                check_initial(&self.initial, self.k_x, r * self.k_x)?;
            }
        }
        check_precision(self.precision)
    }
}
