//! Subcommand bodies. Each returns the files it wrote so the binary can
//! report them; nothing here prints.

use std::path::{Path, PathBuf};

use maxcons::bounds::{compute_bounds_report, BoundsReport};
use maxcons::consensus::{robust_max_consensus, run_conventional, run_noisy_max, StreamSeed, Trajectory};
use maxcons::{Graph, NoiseModel, StateVector};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::csv::{fmt_num, Table};
use crate::error::{CliError, CliResult};

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// A validated configuration with the graph loaded and derived quantities
/// resolved.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: ExperimentConfig,
    pub graph: Graph,
    pub model: NoiseModel,
    pub seed: u64,
    pub diameter: usize,
    pub rho: f64,
    pub t2: usize,
}

impl Context {
    pub fn new(mut cfg: ExperimentConfig, seed: u64) -> CliResult<Self> {
        cfg.validate()?;
        cfg.seed = Some(seed);
        let graph = cfg.load_graph()?;
        let model = cfg.noise_model()?;
        let diameter = graph.diameter()?;
        let rho = graph.spectral_radius()?;
        let t2 = cfg.resolve_t2(diameter)?;
        cfg.t2 = Some(t2);
        Ok(Context { cfg, graph, model, seed, diameter, rho, t2 })
    }

    pub fn x0(&self) -> StateVector {
        self.cfg.initial_state(self.graph.n_nodes())
    }

    pub fn graph_json(&self) -> Value {
        json!({
            "n_nodes": self.graph.n_nodes(),
            "edge_count": self.graph.edge_count(),
            "diameter": self.diameter,
            "spectral_radius": self.rho,
        })
    }

    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf).unwrap_or_else(|| self.cfg.output_dir.clone())
    }
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Summary printed by `validate`.
pub fn validate(ctx: &Context) -> Value {
    json!({
        "version": VERSION,
        "seed": ctx.seed,
        "graph": ctx.graph_json(),
        "t2": ctx.t2,
        "config": ctx.cfg,
    })
}

pub const BOUNDS_HEADER: [&str; 11] = [
    "n_nodes",
    "spectral_radius",
    "erasure_probability",
    "upper_large_deviation",
    "upper_gaussian_closed_form",
    "upper_alternative_rate_root",
    "upper_mgf_direct",
    "upper_empirical_corrected",
    "lower_greedy_walk",
    "beta_star",
    "phi_correction",
];

pub fn bounds_table(r: &BoundsReport) -> Table {
    let mut t = Table::new(&BOUNDS_HEADER);
    t.push_cells(vec![
        r.n_nodes.to_string(),
        fmt_num(r.rho),
        fmt_num(r.p),
        fmt_num(r.upper_ldp),
        r.upper_gaussian_closed.map(fmt_num).unwrap_or_default(),
        fmt_num(r.upper_alternative),
        fmt_num(r.upper_mgf_direct),
        fmt_num(r.upper_empirical),
        fmt_num(r.lower),
        fmt_num(r.beta_star),
        fmt_num(r.phi),
    ]);
    t
}

pub fn bounds(ctx: &Context, out: &Path) -> CliResult<Vec<PathBuf>> {
    let report = compute_bounds_report(&ctx.model, &ctx.graph, ctx.cfg.p)?;
    let path = out.join("bounds.csv");
    bounds_table(&report).write(&path)?;
    Ok(vec![path])
}

pub fn summary_table(tr: &Trajectory) -> Table {
    let mut t = Table::new(&["t", "mean_state", "min_state", "max_state", "std_state"]);
    for k in 0..=tr.t_count() {
        let s = tr.summary(k);
        t.push_numbers(&[k as f64, s.mean, s.min, s.max, s.std]);
    }
    t
}

/// One uncompensated run from the configured initial state for `t_max`
/// iterations on stream 0.
pub fn simulate(ctx: &Context, out: &Path) -> CliResult<Vec<PathBuf>> {
    let tr = run_conventional(&ctx.graph, &ctx.x0(), &ctx.model, ctx.cfg.p, ctx.cfg.t_max, StreamSeed::new(ctx.seed, 0))?;
    let path = out.join("simulate.csv");
    summary_table(&tr).write(&path)?;
    Ok(vec![path])
}

/// One two-run execution (trial 0): the zero-start estimation run, the
/// compensated run, and the per-node drift estimates.
pub fn robust(ctx: &Context, out: &Path) -> CliResult<Vec<PathBuf>> {
    let n = ctx.graph.n_nodes();
    let first = run_noisy_max(
        &ctx.graph,
        &StateVector::zeros(n),
        &ctx.model,
        ctx.cfg.p,
        ctx.cfg.t_max,
        StreamSeed::new(ctx.seed, 0),
        None,
    )?;
    let run = robust_max_consensus(&ctx.graph, &ctx.x0(), &ctx.model, ctx.cfg.p, ctx.cfg.t_max, ctx.t2, ctx.seed, 0)?;
    let t_max = ctx.cfg.t_max as f64;
    if first.final_state().iter().zip(&run.lambda_hat).any(|(x, l)| x / t_max != *l) {
        return Err(CliError::Invariant("first run and drift estimate disagree".into()));
    }
    let dir = out.join("robust");
    let mut written = Vec::new();
    let p1 = dir.join("first_run.csv");
    summary_table(&first).write(&p1)?;
    written.push(p1);
    let p2 = dir.join("second_run.csv");
    summary_table(&run.second_run).write(&p2)?;
    written.push(p2);
    let mut lam = Table::new(&["node", "lambda_hat", "final_estimate"]);
    for i in 0..n {
        lam.push_numbers(&[i as f64, run.lambda_hat[i], run.final_estimates[i]]);
    }
    let p3 = dir.join("lambda_hat.csv");
    lam.write(&p3)?;
    written.push(p3);
    Ok(written)
}
