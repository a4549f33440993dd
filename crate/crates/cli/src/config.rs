//! Experiment configuration (JSON, strict).
//!
//! ```json
//! {
//!   "graph": { "generator": { "kind": "geometric", "n": 75, "seed": 1 } },
//!   "noise": { "family": "gaussian", "variance": 1.0 },
//!   "p": 0.0,
//!   "t_max": 400,
//!   "trials": 500,
//!   "seed": 7,
//!   "output_dir": "out"
//! }
//! ```
//!
//! Unknown fields are rejected. Every numeric field is checked before any
//! simulation starts, and errors name the offending field.

use std::path::{Path, PathBuf};

use maxcons::graph::{generators, parse_edge_list};
use maxcons::{Graph, NoiseFamily, NoiseModel, StateVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_TRIALS: usize = 500;
pub const DEFAULT_T_MAX: usize = 400;
pub const DEFAULT_HORIZON: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphSource {
    File {
        path: PathBuf,
        #[serde(default)]
        one_indexed: bool,
    },
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Geometric,
    Gnp,
    Complete,
    Cycle,
    Path,
    Star,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Geometric graphs: grow the radius until the spectral radius reaches this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_rho: Option<f64>,
    /// Edge probability for `gnp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub family: NoiseFamily,
    #[serde(default = "one")]
    pub variance: f64,
}

fn one() -> f64 {
    1.0
}

/// Initial measurements `x0`, evenly spaced on `[low, high]` by node index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub low: f64,
    pub high: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig { low: 100.0, high: 200.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub p: f64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    /// Second-run length; defaults to twice the diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub initial: InitialConfig,
    /// Iterations plotted for time-series figures.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_sma_betas")]
    pub sma_betas: Vec<f64>,
}

fn default_t_max() -> usize {
    DEFAULT_T_MAX
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

fn default_sma_betas() -> Vec<f64> {
    vec![6.0, 10.0]
}

pub fn parse_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = parse_config_str(&text)?;
    if let GraphSource::File { path: graph_path, .. } = &mut cfg.graph {
        if graph_path.is_relative() {
            if let Some(dir) = path.parent() {
                *graph_path = dir.join(&*graph_path);
            }
        }
    }
    Ok(cfg)
}

pub fn parse_config_str(text: &str) -> CliResult<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.p >= 0.0 && self.p < 1.0) {
            return Err(CliError::field("p", format!("erasure probability must lie in [0, 1), got {}", self.p)));
        }
        if self.t_max == 0 {
            return Err(CliError::field("t_max", "must be >= 1"));
        }
        if self.t2 == Some(0) {
            return Err(CliError::field("t2", "must be >= 1"));
        }
        if self.trials == 0 {
            return Err(CliError::field("trials", "must be >= 1"));
        }
        if self.horizon == 0 {
            return Err(CliError::field("horizon", "must be >= 1"));
        }
        if !(self.noise.variance.is_finite() && self.noise.variance >= 0.0) {
            return Err(CliError::field("noise.variance", format!("must be finite and >= 0, got {}", self.noise.variance)));
        }
        let init = &self.initial;
        if !(init.low.is_finite() && init.high.is_finite() && init.low <= init.high) {
            return Err(CliError::field("initial", "need finite low <= high"));
        }
        if let Some(b) = self.sma_betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(CliError::field("sma_betas", format!("every beta must be positive, got {b}")));
        }
        if let GraphSource::Generator(spec) = &self.graph {
            if spec.n == 0 {
                return Err(CliError::field("graph.generator.n", "must be >= 1"));
            }
            if let Some(r) = spec.target_rho {
                if !(r.is_finite() && r > 0.0) {
                    return Err(CliError::field("graph.generator.target_rho", "must be positive"));
                }
                if spec.kind != GeneratorKind::Geometric {
                    return Err(CliError::field("graph.generator.target_rho", "only applies to geometric graphs"));
                }
            }
            if let Some(q) = spec.q {
                if !(q > 0.0 && q <= 1.0) {
                    return Err(CliError::field("graph.generator.q", "must lie in (0, 1]"));
                }
            }
        }
        Ok(())
    }

    pub fn noise_model(&self) -> CliResult<NoiseModel> {
        NoiseModel::new(self.noise.family, self.noise.variance).map_err(|e| CliError::field("noise", e.to_string()))
    }

    pub fn load_graph(&self) -> CliResult<Graph> {
        match &self.graph {
            GraphSource::File { path, one_indexed } => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                parse_edge_list(&text, *one_indexed).map_err(|e| CliError::field("graph.file", e.to_string()))
            }
            GraphSource::Generator(spec) => {
                let field = |e: maxcons::Error| CliError::field("graph.generator", e.to_string());
                match spec.kind {
                    GeneratorKind::Geometric => generators::random_geometric(spec.n, spec.seed, spec.target_rho),
                    GeneratorKind::Gnp => generators::gnp_connected(spec.n, spec.q.unwrap_or(0.3), spec.seed),
                    GeneratorKind::Complete => generators::complete(spec.n),
                    GeneratorKind::Cycle => generators::cycle(spec.n),
                    GeneratorKind::Path => generators::path(spec.n),
                    GeneratorKind::Star => {
                        if spec.n < 2 {
                            return Err(CliError::field("graph.generator.n", "a star needs at least 2 nodes"));
                        }
                        generators::star(spec.n - 1)
                    }
                }
                .map_err(field)
            }
        }
    }

    /// `t2`, defaulting to twice the diameter; checked against the diameter.
    pub fn resolve_t2(&self, diameter: usize) -> CliResult<usize> {
        let t2 = self.t2.unwrap_or(2 * diameter).max(1);
        if t2 < diameter {
            return Err(CliError::field("t2", format!("must be >= the graph diameter {diameter}, got {t2}")));
        }
        Ok(t2)
    }

    pub fn initial_state(&self, n: usize) -> StateVector {
        let InitialConfig { low, high } = self.initial;
        let values = if n == 1 {
            vec![high]
        } else {
            (0..n).map(|k| low + (high - low) * k as f64 / (n - 1) as f64).collect()
        };
        StateVector::new(values).expect("validated initial range is finite")
    }
}

/// Priority: command line, then config file, then `MAXCONS_SEED`, then 0.
pub fn resolve_seed(cli: Option<u64>, cfg: &ExperimentConfig, env: Option<&str>) -> CliResult<u64> {
    if let Some(s) = cli.or(cfg.seed) {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::field("MAXCONS_SEED", format!("not a 64-bit unsigned integer: {v:?}"))),
        None => Ok(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"graph": {"generator": {"kind": "geometric", "n": 75}}, "noise": {"family": "gaussian"}}"#;

    #[test]
    fn defaults_are_filled() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.trials, 500);
        assert_eq!(cfg.t_max, 400);
        assert_eq!(cfg.p, 0.0);
        assert_eq!(cfg.noise.variance, 1.0);
        assert_eq!(cfg.t2, None);
        assert_eq!(cfg.initial, InitialConfig { low: 100.0, high: 200.0 });
    }

    #[test]
    fn bad_erasure_names_field() {
        let text = MINIMAL.replace("}}, \"noise\"", "}}, \"p\": 1.3, \"noise\"");
        match parse_config_str(&text) {
            Err(CliError::Field { field, .. }) => assert_eq!(field, "p"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MINIMAL.replace("\"noise\"", "\"colour\": 3, \"noise\"");
        assert!(matches!(parse_config_str(&text), Err(CliError::Config(_))));
        let nested = MINIMAL.replace("\"n\": 75", "\"n\": 75, \"radius\": 0.2");
        assert!(parse_config_str(&nested).is_err());
    }

    #[test]
    fn seed_priority() {
        let mut cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(resolve_seed(None, &cfg, None).unwrap(), 0);
        assert_eq!(resolve_seed(None, &cfg, Some("9")).unwrap(), 9);
        cfg.seed = Some(4);
        assert_eq!(resolve_seed(None, &cfg, Some("9")).unwrap(), 4);
        assert_eq!(resolve_seed(Some(2), &cfg, Some("9")).unwrap(), 2);
        cfg.seed = None;
        assert!(resolve_seed(None, &cfg, Some("x")).is_err());
    }

    #[test]
    fn initial_state_spans_range() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        let x0 = cfg.initial_state(5);
        assert_eq!(x0.values(), &[100.0, 125.0, 150.0, 175.0, 200.0]);
    }

    #[test]
    fn t2_defaults_to_twice_diameter() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.resolve_t2(3).unwrap(), 6);
        let mut short = cfg.clone();
        short.t2 = Some(2);
        assert!(short.resolve_t2(3).is_err());
    }
}
