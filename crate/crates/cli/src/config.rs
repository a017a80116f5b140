//! Experiment configuration: a JSON file, `key=value` overrides, then
//! validation into the typed inputs each experiment needs.

use std::path::Path;

use num_complex::Complex64;
use pft_core::fock::basis::{FockModel, ModeIndex, Spin, Statistics};
use pft_core::fock::state::{Monomial, PolynomialFunction, Term};
use pft_core::lattice::MAX_ANALYTIC_EXTENT;
use pft_core::operator::MAX_DENSE_DIM;
use pft_core::{mirror_site, pst_time, ExecMode, LatticeDims, SiteIndex};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Couplings,
    Evolve,
    Fidelity,
    Sweep,
    Verify,
    Disorder,
    Dressing,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Couplings => "couplings",
            Experiment::Evolve => "evolve",
            Experiment::Fidelity => "fidelity",
            Experiment::Sweep => "sweep",
            Experiment::Verify => "verify",
            Experiment::Disorder => "disorder",
            Experiment::Dressing => "dressing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsName {
    #[default]
    Boson,
    Fermion,
    Hardcore,
}

impl From<StatisticsName> for Statistics {
    fn from(s: StatisticsName) -> Self {
        match s {
            StatisticsName::Boson => Statistics::Boson,
            StatisticsName::Fermion => Statistics::Fermion,
            StatisticsName::Hardcore => Statistics::HardCore,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DressingName {
    #[default]
    Lz,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExecName {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinName {
    Up,
    Down,
}

/// One creation operator raised to a power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub site: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinName>,
    #[serde(default = "one")]
    pub power: u32,
}

fn one() -> u32 {
    1
}

/// coefficient * product of factors, leftmost factor first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coefficient: [f64; 2],
    #[serde(default)]
    pub factors: Vec<FactorSpec>,
}

/// Evenly spaced time grid, both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    /// Lattice extents, 1 to 3 axes.
    pub dims: Option<Vec<usize>>,
    /// Per-axis J; defaults to 1 on every axis.
    pub couplings: Option<Vec<f64>>,
    pub statistics: StatisticsName,
    pub spinful: bool,
    /// Transferred function; defaults to a single particle at the source.
    pub function: Option<Vec<TermSpec>>,
    pub source: Option<Vec<usize>>,
    pub target: Option<Vec<usize>>,
    /// Evolution time; defaults to the transfer time pi/|J|.
    pub time: Option<f64>,
    /// Explicit sweep times; overrides `grid`.
    pub times: Option<Vec<f64>>,
    pub grid: Option<GridSpec>,
    pub theta: Option<f64>,
    pub dressing: DressingName,
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub exec: ExecName,
    pub out: Option<String>,
    pub format: Format,
}

/// Largest number of disorder samples accepted.
pub const MAX_SAMPLES: usize = 1_000_000;
/// Largest sweep grid accepted.
pub const MAX_GRID: usize = 1_000_000;

/// Reads the config file, or starts from an empty object.
pub fn load(path: Option<&Path>) -> CliResult<Value> {
    let Some(path) = path else {
        return Ok(Value::Object(Map::new()));
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::validation("config", format!("cannot read {}: {e}", path.display()))
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::validation(
            "config",
            format!("{} is not valid JSON: {e}", path.display()),
        )
    })?;
    if !value.is_object() {
        return Err(CliError::validation(
            "config",
            "top level must be a JSON object",
        ));
    }
    Ok(value)
}

/// Applies one `key=value` override. The value is read as JSON when it
/// parses, otherwise as a plain string.
pub fn apply_override(config: &mut Value, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| {
        CliError::validation("--set", format!("expected key=value, got '{assignment}'"))
    })?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::validation(
            "--set",
            format!("empty key in '{assignment}'"),
        ));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    config
        .as_object_mut()
        .expect("config is an object")
        .insert(key.to_string(), value);
    Ok(())
}

/// Deserializes with unknown fields rejected; the message names the field.
pub fn parse(value: Value) -> CliResult<ExperimentConfig> {
    serde_json::from_value(value).map_err(|e| {
        let msg = e.to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.starts_with("unknown field"))
            .unwrap_or("config")
            .to_string();
        CliError::validation(&field, msg)
    })
}

/// SHA-256 of the canonical JSON of the config, output location excluded.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let mut hashed = config.clone();
    hashed.out = None;
    hashed.format = Format::default();
    let text = serde_json::to_string(&hashed).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Validated inputs shared by the experiments.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub experiment: Experiment,
    pub dims: LatticeDims,
    pub couplings: Vec<f64>,
    pub statistics: Statistics,
    pub spinful: bool,
    pub function: Option<PolynomialFunction>,
    pub source: SiteIndex,
    pub target: SiteIndex,
    pub time: f64,
    pub t0: Option<f64>,
    pub times: Vec<f64>,
    pub theta: f64,
    pub dressing: DressingName,
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
    pub mode: ExecMode,
}

impl Resolved {
    pub fn model(&self) -> CliResult<FockModel> {
        FockModel::new(self.dims.clone(), self.statistics, self.spinful)
            .map_err(|e| CliError::field("spinful", e))
    }

    /// The configured function, or a single particle at the source.
    pub fn function_or_default(&self) -> PolynomialFunction {
        self.function.clone().unwrap_or_else(|| {
            PolynomialFunction::linear(&ModeIndex {
                site: self.source.clone(),
                spin: self.spinful.then_some(Spin::Up),
            })
        })
    }
}

fn finite(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(
            field,
            format!("{v} is not a finite number"),
        ))
    }
}

fn site(field: &str, dims: &LatticeDims, coords: &[usize]) -> CliResult<SiteIndex> {
    let s = SiteIndex::new(coords);
    dims.check_site(&s).map_err(|e| CliError::field(field, e))?;
    Ok(s)
}

/// Checks every field against the preconditions of `experiment`.
pub fn resolve(config: &ExperimentConfig, experiment: Experiment) -> CliResult<Resolved> {
    if let Some(e) = config.experiment {
        if e != experiment {
            return Err(CliError::validation(
                "experiment",
                format!(
                    "config names '{}' but the '{}' subcommand was run",
                    e.name(),
                    experiment.name()
                ),
            ));
        }
    }
    let extents = config.dims.clone().unwrap_or_else(|| vec![3, 3]);
    let dims = LatticeDims::for_transfer(&extents).map_err(|e| CliError::field("dims", e))?;

    let max_extent = match experiment {
        Experiment::Couplings => None,
        Experiment::Disorder => Some(MAX_DENSE_DIM),
        _ => Some(MAX_ANALYTIC_EXTENT),
    };
    if let Some(max) = max_extent {
        if let Some(&e) = extents.iter().find(|&&e| e > max) {
            return Err(CliError::validation(
                "dims",
                format!(
                    "unsupported size: extent {e} exceeds {max} for {}",
                    experiment.name()
                ),
            ));
        }
    }

    let couplings = config
        .couplings
        .clone()
        .unwrap_or_else(|| vec![1.0; dims.rank()]);
    if couplings.len() != dims.rank() {
        return Err(CliError::validation(
            "couplings",
            format!(
                "{} values for a lattice with {} axes",
                couplings.len(),
                dims.rank()
            ),
        ));
    }
    for &j in &couplings {
        finite("couplings", j)?;
    }
    let t0 = match couplings.iter().all(|&j| j == couplings[0]) {
        true => pst_time(couplings[0]).ok(),
        false => None,
    };

    let source = site(
        "source",
        &dims,
        &config
            .source
            .clone()
            .unwrap_or_else(|| vec![1; dims.rank()]),
    )?;
    let target = match &config.target {
        Some(t) => site("target", &dims, t)?,
        None => mirror_site(&source, &dims).map_err(|e| CliError::field("source", e))?,
    };

    let time = match config.time {
        Some(t) => finite("time", t)?,
        None => t0.unwrap_or(std::f64::consts::PI),
    };

    let times = match (&config.times, &config.grid) {
        (Some(ts), _) => {
            if ts.is_empty() || ts.len() > MAX_GRID {
                return Err(CliError::validation(
                    "times",
                    format!("need 1..={MAX_GRID} times, got {}", ts.len()),
                ));
            }
            for &t in ts {
                finite("times", t)?;
            }
            if ts.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::validation("times", "must be strictly increasing"));
            }
            ts.clone()
        }
        (None, Some(g)) => {
            finite("grid", g.start)?;
            finite("grid", g.stop)?;
            if g.points < 2 || g.points > MAX_GRID || g.stop <= g.start {
                return Err(CliError::validation(
                    "grid",
                    format!("need stop > start and 2..={MAX_GRID} points"),
                ));
            }
            let step = (g.stop - g.start) / (g.points - 1) as f64;
            (0..g.points).map(|k| g.start + k as f64 * step).collect()
        }
        (None, None) => {
            let span = 2.0 * t0.unwrap_or(std::f64::consts::PI);
            (0..=200).map(|k| k as f64 * span / 200.0).collect()
        }
    };

    let theta = finite("theta", config.theta.unwrap_or(0.7))?;
    let epsilon = finite("epsilon", config.epsilon.unwrap_or(0.01))?;
    if epsilon < 0.0 {
        return Err(CliError::validation(
            "epsilon",
            format!("{epsilon} is negative"),
        ));
    }
    let samples = config.samples.unwrap_or(100);
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(CliError::validation(
            "samples",
            format!("need 1..={MAX_SAMPLES}, got {samples}"),
        ));
    }

    let statistics: Statistics = config.statistics.into();
    if config.spinful && statistics != Statistics::Fermion {
        return Err(CliError::validation(
            "spinful",
            "spin is only supported for fermions",
        ));
    }
    let function = match &config.function {
        Some(terms) => Some(build_function(terms, &dims, config.spinful, statistics)?),
        None => None,
    };

    Ok(Resolved {
        experiment,
        dims,
        couplings,
        statistics,
        spinful: config.spinful,
        function,
        source,
        target,
        time,
        t0,
        times,
        theta,
        dressing: config.dressing,
        epsilon,
        samples,
        seed: config.seed,
        mode: match config.exec {
            ExecName::Parallel => ExecMode::Parallel,
            ExecName::Sequential => ExecMode::Sequential,
        },
    })
}

fn build_function(
    terms: &[TermSpec],
    dims: &LatticeDims,
    spinful: bool,
    statistics: Statistics,
) -> CliResult<PolynomialFunction> {
    if terms.is_empty() {
        return Err(CliError::validation("function", "needs at least one term"));
    }
    let mut out = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        let [re, im] = t.coefficient;
        finite("function", re)?;
        finite("function", im)?;
        let mut factors = Vec::with_capacity(t.factors.len());
        for f in &t.factors {
            let s = site("function", dims, &f.site)?;
            let spin = match (spinful, f.spin) {
                (true, Some(SpinName::Up)) => Some(Spin::Up),
                (true, Some(SpinName::Down)) => Some(Spin::Down),
                (false, None) => None,
                (true, None) => {
                    return Err(CliError::validation(
                        "function",
                        format!("term {k}: spinful model needs a spin on every factor"),
                    ))
                }
                (false, Some(_)) => {
                    return Err(CliError::validation(
                        "function",
                        format!("term {k}: spin given for a spinless model"),
                    ))
                }
            };
            if statistics != Statistics::Boson && f.power > 1 {
                return Err(CliError::validation(
                    "function",
                    format!(
                        "term {k}: power {} on a mode that holds at most one particle",
                        f.power
                    ),
                ));
            }
            factors.push((ModeIndex { site: s, spin }, f.power));
        }
        out.push(Term {
            coefficient: Complex64::new(re, im),
            monomial: Monomial { factors },
        });
    }
    PolynomialFunction::new(out).map_err(|e| CliError::field("function", e))
}
