//! Figure recipes. Each writes `out/{figure}/{series}.csv` plus
//! `metadata.json`.
//!
//! Random stream layout for a run with `trials = K` and base seed `s`:
//!
//! | use                            | streams                |
//! |--------------------------------|------------------------|
//! | growth trial `k`               | `k`                    |
//! | robust trial `k`               | `2k`, `2k + 1`         |
//! | conventional trial `k`         | `2K + k`               |
//! | soft-max trial `k`, β index `b`| `(3 + b)K + k`         |

use std::path::{Path, PathBuf};
use std::str::FromStr;

use maxcons::bounds::compute_bounds_report;
use maxcons::consensus::{monte_carlo_growth, monte_carlo_robust, run_conventional, StreamSeed};
use maxcons::sma::{run_sma_baseline, SMA_LABEL};
use maxcons::stats;
use maxcons::{NoiseFamily, NoiseModel};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::commands::{write_json, Context, VERSION};
use crate::config::InitialConfig;
use crate::csv::Table;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig7,
    Fig7Rand,
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 7] =
        [FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig7, FigureId::Fig7Rand, FigureId::Fig8];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig7 => "fig7",
            FigureId::Fig7Rand => "fig7rand",
            FigureId::Fig8 => "fig8",
        }
    }

    /// The recipe for each figure.
    pub fn recipe(self) -> FigureRecipe {
        use NoiseFamily::*;
        let (family, p, series): (NoiseFamily, f64, &'static [(&'static str, &'static str)]) = match self {
            FigureId::Fig2 => (Gaussian, 0.0, GROWTH_SERIES),
            FigureId::Fig3 => (Gaussian, 0.5, GROWTH_SERIES),
            FigureId::Fig4 => (Laplace, 0.0, GROWTH_SERIES),
            FigureId::Fig5 => (Uniform, 0.0, GROWTH_SERIES),
            FigureId::Fig7 => (Gaussian, 0.0, DRIFT_SERIES),
            FigureId::Fig7Rand => (Gaussian, 0.5, DRIFT_SERIES),
            FigureId::Fig8 => (Gaussian, 0.0, &[]),
        };
        FigureRecipe { id: self, family, p, series }
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::field("figure", format!("unknown figure {s:?}; expected one of fig2, fig3, fig4, fig5, fig7, fig7rand, fig8")))
    }
}

/// A figure's noise family, erasure probability and series list. The
/// configured variance, graph, trial counts and seed are kept; `fig8`
/// additionally fixes the initial measurements to be evenly spaced on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRecipe {
    pub id: FigureId,
    pub family: NoiseFamily,
    pub p: f64,
    pub series: &'static [(&'static str, &'static str)],
}

const GROWTH_SERIES: &[(&str, &str)] = &[
    ("growth_per_node", "Monte Carlo growth-rate estimate x_i(t_max)/t_max per node, mean and standard error over trials"),
    ("lower", "greedy-walk lower bound, constant across nodes"),
    ("upper_ldp", "large-deviation upper bound, constant across nodes"),
    ("upper_empirical", "large-deviation upper bound times phi = 1 - 1/(2 sqrt N)"),
    ("mean_slope", "growth-rate estimate averaged over nodes and trials"),
];

const DRIFT_SERIES: &[(&str, &str)] = &[
    ("conventional", "uncompensated max consensus from x0: network-mean state per iteration, mean and standard error over trials"),
    ("robust", "drift-compensated second run from x0: network-mean state per iteration, mean and standard error over trials"),
    ("true_max", "max of the initial measurements"),
];

fn constant_by_node(n: usize, value: f64) -> Table {
    let mut t = Table::new(&["node", "value"]);
    for i in 0..n {
        t.push_numbers(&[i as f64, value]);
    }
    t
}

fn constant_by_time(horizon: usize, value: f64) -> Table {
    let mut t = Table::new(&["t", "value"]);
    for k in 0..=horizon {
        t.push_numbers(&[k as f64, value]);
    }
    t
}

/// Column means and standard errors of equal-length series.
fn mean_se_table(series: &[Vec<f64>]) -> Table {
    let mut t = Table::new(&["t", "mean", "stderr"]);
    for k in 0..series[0].len() {
        let col: Vec<f64> = series.iter().map(|s| s[k]).collect();
        t.push_numbers(&[k as f64, stats::mean(&col), stats::std_error(&col)]);
    }
    t
}

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    fn put(&mut self, name: &str, table: &Table) -> CliResult<()> {
        let path = self.dir.join(format!("{name}.csv"));
        table.write(&path)?;
        self.written.push(path);
        Ok(())
    }
}

pub fn reproduce_figure(ctx: &Context, figure: FigureId, out: &Path) -> CliResult<Vec<PathBuf>> {
    let recipe = figure.recipe();
    let model = NoiseModel::new(recipe.family, ctx.cfg.noise.variance)?;
    let mut cfg = ctx.cfg.clone();
    cfg.noise.family = recipe.family;
    cfg.p = recipe.p;
    let p = recipe.p;
    let g = &ctx.graph;
    let n = g.n_nodes();
    let trials = cfg.trials;
    let bounds = compute_bounds_report(&model, g, p)?;
    let mut output = Output { dir: out.join(figure.name()), written: Vec::new() };
    let mut series = Map::new();
    let mut summary = Map::new();

    match figure {
        FigureId::Fig2 | FigureId::Fig3 | FigureId::Fig4 | FigureId::Fig5 => {
            let mc = monte_carlo_growth(g, &model, p, cfg.t_max, trials, ctx.seed)?;
            let mut per_node = Table::new(&["node", "lambda_hat_mean", "lambda_hat_stderr"]);
            for i in 0..n {
                let xs = mc.node_samples(i);
                per_node.push_numbers(&[i as f64, stats::mean(&xs), stats::std_error(&xs)]);
            }
            output.put("growth_per_node", &per_node)?;
            output.put("lower", &constant_by_node(n, bounds.lower))?;
            output.put("upper_ldp", &constant_by_node(n, bounds.upper_ldp))?;
            output.put("upper_empirical", &constant_by_node(n, bounds.upper_empirical))?;
            output.put("mean_slope", &constant_by_node(n, mc.mean()))?;
            summary.insert("mean_slope".into(), json!(mc.mean()));
            summary.insert("mean_slope_stderr".into(), json!(mc.stderr()));
            summary.insert("below_empirical_bound".into(), json!(mc.mean() <= bounds.upper_empirical));
            for (name, desc) in recipe.series {
                series.insert(format!("{name}.csv"), json!(desc));
            }
        }
        FigureId::Fig7 | FigureId::Fig7Rand => {
            let x0 = ctx.x0();
            let horizon = cfg.horizon.max(ctx.t2);
            let runs = monte_carlo_robust(g, &x0, &model, p, cfg.t_max, horizon, trials, ctx.seed)?;
            let robust_series: Vec<Vec<f64>> = runs.iter().map(|r| r.second_run.mean_series()).collect();
            let conventional: Vec<Vec<f64>> = (0..trials as u64)
                .into_par_iter()
                .map(|k| {
                    run_conventional(g, &x0, &model, p, horizon, StreamSeed::new(ctx.seed, 2 * trials as u64 + k))
                        .map(|tr| tr.mean_series())
                })
                .collect::<Result<_, _>>()?;
            output.put("conventional", &mean_se_table(&conventional))?;
            output.put("robust", &mean_se_table(&robust_series))?;
            output.put("true_max", &constant_by_time(horizon, x0.max()))?;
            let at_t2: Vec<f64> = robust_series.iter().map(|s| s[ctx.t2]).collect();
            summary.insert("robust_mean_at_t2".into(), json!(stats::mean(&at_t2)));
            summary.insert("robust_stderr_at_t2".into(), json!(stats::std_error(&at_t2)));
            let conv_end: Vec<f64> = conventional.iter().map(|s| s[horizon]).collect();
            summary.insert("conventional_mean_at_horizon".into(), json!(stats::mean(&conv_end)));
            summary.insert("horizon".into(), json!(horizon));
            let d = ctx.diameter as f64;
            summary.insert(
                "end_to_end_variance_bound".into(),
                json!(model.variance() * (d * d / cfg.t_max as f64 + d)),
            );
            for (name, desc) in recipe.series {
                series.insert(format!("{name}.csv"), json!(desc));
            }
        }
        FigureId::Fig8 => {
            cfg.initial = InitialConfig { low: 0.0, high: 1.0 };
            let x0 = cfg.initial_state(n);
            let horizon = cfg.horizon.max(ctx.t2);
            let runs = monte_carlo_robust(g, &x0, &model, p, cfg.t_max, horizon, trials, ctx.seed)?;
            let robust_series: Vec<Vec<f64>> = runs.iter().map(|r| r.second_run.mean_series()).collect();
            output.put("robust", &mean_se_table(&robust_series))?;
            series.insert("robust.csv".into(), json!(DRIFT_SERIES[1].1));
            for (b, &beta) in cfg.sma_betas.iter().enumerate() {
                let base = (3 + b as u64) * trials as u64;
                let sma: Vec<Vec<f64>> = (0..trials as u64)
                    .into_par_iter()
                    .map(|k| {
                        run_sma_baseline(g, &x0, &model, beta, horizon, StreamSeed::new(ctx.seed, base + k))
                            .map(|tr| tr.mean_series())
                    })
                    .collect::<Result<_, _>>()?;
                let name = format!("sma_beta_{}", crate::csv::fmt_num(beta));
                output.put(&name, &mean_se_table(&sma))?;
                series.insert(
                    format!("{name}.csv"),
                    json!(format!("{SMA_LABEL}: soft-max average consensus with beta = {beta}, network-mean reconstructed estimate")),
                );
            }
            output.put("true_max", &constant_by_time(horizon, x0.max()))?;
            series.insert("true_max.csv".into(), json!(DRIFT_SERIES[2].1));
            summary.insert("sma_label".into(), json!(SMA_LABEL));
            summary.insert("horizon".into(), json!(horizon));
        }
    }

    let meta = json!({
        "figure": figure.name(),
        "version": VERSION,
        "config": cfg,
        "seed": ctx.seed,
        "stream_layout": "growth trial k: stream k; robust trial k: streams 2k and 2k+1; conventional trial k: stream 2K+k; soft-max trial k with beta index b: stream (3+b)K+k; K = trials",
        "graph": ctx.graph_json(),
        "phi": bounds.phi,
        "bounds": bounds,
        "series": Value::Object(series),
        "summary": Value::Object(summary),
    });
    let meta_path = output.dir.join("metadata.json");
    write_json(&meta_path, &meta)?;
    output.written.push(meta_path);
    Ok(output.written)
}
