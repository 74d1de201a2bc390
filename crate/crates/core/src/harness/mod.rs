//! Experiment registry, configuration and run reports shared by the CLI and
//! the acceptance suite.

mod experiments;

pub use experiments::{registry, Experiment, ParamSpec};

use crate::error::{Error, Result};
use crate::prime_tools::{build_prime_table, PrimeTable};
use crate::rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

pub const RUN_SCHEMA: &str = "chaoslab.run/1";
pub const SUITE_SCHEMA: &str = "chaoslab.suite/1";

/// Primes available to every experiment.
pub const SHARED_TABLE_SIZE: usize = 1_000_000;

pub fn shared_table() -> Result<&'static PrimeTable> {
    static T: OnceLock<std::result::Result<PrimeTable, String>> = OnceLock::new();
    T.get_or_init(|| build_prime_table(SHARED_TABLE_SIZE).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::numeric(e.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replicas: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig { experiment: experiment.into(), seed: 0, replicas: 1, params: BTreeMap::new(), output_path: None }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub runs: Vec<ExperimentConfig>,
}

/// One checked statistic; pass = |estimate − target| ≤ tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub statistic: String,
    pub estimate: f64,
    pub se: Option<f64>,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Row {
    pub fn new(statistic: impl Into<String>, estimate: f64, se: Option<f64>, target: f64, tolerance: f64) -> Self {
        let pass = (estimate - target).abs() <= tolerance;
        Row { statistic: statistic.into(), estimate, se, target, tolerance, pass }
    }

    /// Within k standard errors.
    pub fn within_se(statistic: impl Into<String>, e: crate::stats::Estimate, target: f64, k: f64) -> Self {
        Self::new(statistic, e.mean, Some(e.se), target, k * e.se)
    }

    pub fn relative(statistic: impl Into<String>, estimate: f64, target: f64, rel: f64) -> Self {
        Self::new(statistic, estimate, None, target, rel * target.abs())
    }

    /// Count of trend violations, which must be zero.
    pub fn violations(statistic: impl Into<String>, count: usize) -> Self {
        Self::new(statistic, count as f64, None, 0.0, 0.0)
    }
}

/// Rows plus plot-ready series.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub details: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub config: ExperimentConfig,
    pub criterion: u8,
    pub rows: Vec<Row>,
    pub details: BTreeMap<String, Vec<f64>>,
    pub wall_clock_s: f64,
    pub code_version: &'static str,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() { 0 } else { 1 }
    }
}

/// Resolved parameters of a run.
pub struct Ctx {
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Ctx {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn f(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn n(&self, name: &str) -> usize {
        self.params[name] as usize
    }

    /// Seed for one named random ingredient of the run.
    pub fn seed_for(&self, tag: &str) -> u64 {
        rng::derive(self.seed, rng::name_tag(tag))
    }
}

pub fn find(name: &str) -> Option<&'static Experiment> {
    registry().iter().find(|e| e.name == name)
}

/// Checks the experiment name and parameters and fills in defaults.
pub fn resolve(config: &ExperimentConfig) -> Result<(&'static Experiment, BTreeMap<String, f64>)> {
    let exp = find(&config.experiment).ok_or_else(|| {
        let names: Vec<&str> = registry().iter().map(|e| e.name).collect();
        Error::invalid(format!("unknown experiment '{}'; known: {}", config.experiment, names.join(", ")))
    })?;
    if config.replicas == 0 {
        return Err(Error::invalid("replicas must be positive"));
    }
    for key in config.params.keys() {
        if !exp.params.iter().any(|p| p.name == key) {
            return Err(Error::invalid(format!("experiment '{}' has no parameter '{key}'", exp.name)));
        }
    }
    let mut out = BTreeMap::new();
    for p in exp.params {
        match config.params.get(p.name).copied().or(p.default) {
            Some(v) => {
                if !v.is_finite() || v < p.min || v > p.max || (p.integer && v.fract() != 0.0) {
                    return Err(Error::invalid(format!(
                        "parameter {} = {v} outside [{}, {}]{}",
                        p.name,
                        p.min,
                        p.max,
                        if p.integer { " or not an integer" } else { "" }
                    )));
                }
                out.insert(p.name.to_string(), v);
            }
            None => {}
        }
    }
    Ok((exp, out))
}

/// Runs one configured experiment. Replica r uses the stream
/// derive(derive(seed, experiment), r).
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let (exp, params) = resolve(config)?;
    let start = Instant::now();
    let base = rng::derive(config.seed, rng::name_tag(exp.name));
    let mut rows = Vec::new();
    let mut details = BTreeMap::new();
    for r in 0..config.replicas {
        let ctx = Ctx { params: params.clone(), seed: rng::derive(base, r as u64) };
        let out = (exp.run)(&ctx)?;
        let tag = |s: String| if config.replicas > 1 { format!("r{r}:{s}") } else { s };
        rows.extend(out.rows.into_iter().map(|mut row| {
            row.statistic = tag(row.statistic);
            row
        }));
        details.extend(out.details.into_iter().map(|(k, v)| (tag(k), v)));
    }
    Ok(RunReport {
        schema: RUN_SCHEMA,
        config: config.clone(),
        criterion: exp.criterion,
        rows,
        details,
        wall_clock_s: start.elapsed().as_secs_f64(),
        code_version: env!("CARGO_PKG_VERSION"),
    })
}

/// 0 pass, 1 tolerance failure, 2 usage, 3 numeric failure.
pub fn exit_code(result: &Result<RunReport>) -> i32 {
    match result {
        Ok(r) => r.exit_code(),
        Err(Error::InvalidArgument(_)) => 2,
        Err(_) => 3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub experiment: String,
    pub exit_code: i32,
    pub error: Option<String>,
    pub report: Option<RunReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub runs: Vec<SuiteEntry>,
    pub exit_code: i32,
}

/// Runs every config; the suite exit code is the worst run exit code.
pub fn suite(manifest: &Manifest) -> Result<SuiteReport> {
    if manifest.runs.is_empty() {
        return Err(Error::invalid("manifest has no runs"));
    }
    for c in &manifest.runs {
        resolve(c)?;
    }
    let runs: Vec<SuiteEntry> = manifest
        .runs
        .iter()
        .map(|c| {
            let res = run(c);
            let code = exit_code(&res);
            match res {
                Ok(r) => SuiteEntry { experiment: c.experiment.clone(), exit_code: code, error: None, report: Some(r) },
                Err(e) => SuiteEntry { experiment: c.experiment.clone(), exit_code: code, error: Some(e.to_string()), report: None },
            }
        })
        .collect();
    let exit_code = runs.iter().map(|r| r.exit_code).max().unwrap_or(0);
    Ok(SuiteReport { schema: SUITE_SCHEMA, runs, exit_code })
}
