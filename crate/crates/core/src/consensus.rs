//! Noisy max consensus simulation, growth-rate estimation, and the two-run
//! robust algorithm that subtracts the estimated drift.
//!
//! Randomness is organised by [`StreamSeed`]: a base seed plus a stream
//! index selecting an independent ChaCha8 stream. Monte Carlo trial `k`
//! uses stream `k`; robust trial `k` uses streams `2k` (first run) and
//! `2k + 1` (second run). Results are collected in trial order, so output
//! does not depend on the number of worker threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{check_erasure, Graph};
use crate::maxplus::{noisy_max_step, StateVector};
use crate::noise::NoiseModel;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSeed {
    pub seed: u64,
    pub stream: u64,
}

impl StreamSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        StreamSeed { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Hex SHA-256 over the graph, noise model, erasure probability and stream.
pub fn config_fingerprint(g: &Graph, model: &NoiseModel, p: f64, seed: StreamSeed) -> String {
    let mut h = Sha256::new();
    h.update((g.n_nodes() as u64).to_le_bytes());
    for &(u, v) in g.edges() {
        h.update((u as u64).to_le_bytes());
        h.update((v as u64).to_le_bytes());
    }
    h.update(model.family().name().as_bytes());
    h.update(model.variance().to_bits().to_le_bytes());
    h.update(p.to_bits().to_le_bytes());
    h.update(seed.seed.to_le_bytes());
    h.update(seed.stream.to_le_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Per-iteration node states, `states[t][i] = x_i(t)` for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    states: Vec<Vec<f64>>,
    config_fingerprint: String,
}

/// Cross-node summary of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
}

impl Trajectory {
    pub fn from_states(states: Vec<Vec<f64>>, config_fingerprint: String) -> Self {
        Trajectory { states, config_fingerprint }
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// Number of iterations `T` (one less than the number of stored states).
    pub fn t_count(&self) -> usize {
        self.states.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.states[0].len()
    }

    pub fn state(&self, t: usize) -> &[f64] {
        &self.states[t]
    }

    pub fn final_state(&self) -> &[f64] {
        &self.states[self.states.len() - 1]
    }

    pub fn fingerprint(&self) -> &str {
        &self.config_fingerprint
    }

    pub fn summary(&self, t: usize) -> StateSummary {
        let s = &self.states[t];
        StateSummary {
            mean: stats::mean(s),
            min: s.iter().copied().fold(f64::INFINITY, f64::min),
            max: s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            std: stats::variance(s).sqrt(),
        }
    }

    pub fn mean_series(&self) -> Vec<f64> {
        self.states.iter().map(|s| stats::mean(s)).collect()
    }
}

fn check_common(g: &Graph, x0: &StateVector, p: f64, t: usize) -> Result<()> {
    check_erasure(p)?;
    if t == 0 {
        return Err(Error::Validation("iteration count must be >= 1".into()));
    }
    if x0.len() != g.n_nodes() {
        return Err(Error::Shape { expected: g.n_nodes(), found: x0.len() });
    }
    Ok(())
}

/// Core loop. Each iteration samples a realization (skipped when `p = 0`),
/// applies one noisy max step, then subtracts the per-node compensation.
fn iterate(
    g: &Graph,
    x0: &[f64],
    model: &NoiseModel,
    p: f64,
    t: usize,
    rng: &mut ChaCha8Rng,
    compensation: Option<&[f64]>,
    mut record: impl FnMut(&[f64]),
) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    let full = g.full_realization();
    for _ in 0..t {
        if p == 0.0 {
            noisy_max_step(&full, model, rng, false, &x, &mut next);
        } else {
            let real = g.sample_realization(p, rng)?;
            noisy_max_step(&real, model, rng, false, &x, &mut next);
        }
        if let Some(c) = compensation {
            for (v, ci) in next.iter_mut().zip(c) {
                *v -= ci;
            }
        }
        std::mem::swap(&mut x, &mut next);
        record(&x);
    }
    Ok(x)
}

/// Runs `T` iterations of `x_i ← max(x_i, max_j (x_j + v_ij)) − cᵢ` and
/// records every state.
pub fn run_noisy_max(
    g: &Graph,
    x0: &StateVector,
    model: &NoiseModel,
    p: f64,
    t: usize,
    seed: StreamSeed,
    compensation: Option<&[f64]>,
) -> Result<Trajectory> {
    check_common(g, x0, p, t)?;
    if let Some(c) = compensation {
        if c.len() != g.n_nodes() {
            return Err(Error::Shape { expected: g.n_nodes(), found: c.len() });
        }
    }
    let mut states = Vec::with_capacity(t + 1);
    states.push(x0.values().to_vec());
    let mut rng = seed.rng();
    iterate(g, x0.values(), model, p, t, &mut rng, compensation, |x| states.push(x.to_vec()))?;
    Ok(Trajectory::from_states(states, config_fingerprint(g, model, p, seed)))
}

/// Uncompensated run; the baseline the robust algorithm is compared with.
pub fn run_conventional(
    g: &Graph,
    x0: &StateVector,
    model: &NoiseModel,
    p: f64,
    t: usize,
    seed: StreamSeed,
) -> Result<Trajectory> {
    run_noisy_max(g, x0, model, p, t, seed, None)
}

/// Per-node growth rate estimates `λ̂ᵢ = xᵢ(t_max)/t_max` from a zero start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub lambda_hat_per_node: Vec<f64>,
    pub t_max: usize,
    /// Mean of the per-node estimates.
    pub mean: f64,
    /// Standard error of that mean across nodes.
    pub stderr: f64,
}

impl GrowthEstimate {
    fn from_final(final_state: &[f64], t_max: usize) -> Self {
        let lambda: Vec<f64> = final_state.iter().map(|v| v / t_max as f64).collect();
        GrowthEstimate {
            mean: stats::mean(&lambda),
            stderr: stats::std_error(&lambda),
            lambda_hat_per_node: lambda,
            t_max,
        }
    }
}

pub fn estimate_growth_rate(
    g: &Graph,
    model: &NoiseModel,
    p: f64,
    t_max: usize,
    seed: StreamSeed,
) -> Result<GrowthEstimate> {
    let x0 = StateVector::zeros(g.n_nodes());
    check_common(g, &x0, p, t_max)?;
    let mut rng = seed.rng();
    let last = iterate(g, x0.values(), model, p, t_max, &mut rng, None, |_| ())?;
    Ok(GrowthEstimate::from_final(&last, t_max))
}

/// Independent growth-rate estimates, trial `k` on stream `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloGrowth {
    pub trials: Vec<GrowthEstimate>,
}

impl MonteCarloGrowth {
    /// Estimates of node `i` across trials.
    pub fn node_samples(&self, i: usize) -> Vec<f64> {
        self.trials.iter().map(|e| e.lambda_hat_per_node[i]).collect()
    }

    /// Network-averaged estimate of each trial.
    pub fn trial_means(&self) -> Vec<f64> {
        self.trials.iter().map(|e| e.mean).collect()
    }

    /// Per-node estimate averaged over trials.
    pub fn per_node_mean(&self) -> Vec<f64> {
        let n = self.trials[0].lambda_hat_per_node.len();
        (0..n).map(|i| stats::mean(&self.node_samples(i))).collect()
    }

    pub fn mean(&self) -> f64 {
        stats::mean(&self.trial_means())
    }

    pub fn stderr(&self) -> f64 {
        stats::std_error(&self.trial_means())
    }
}

pub fn monte_carlo_growth(
    g: &Graph,
    model: &NoiseModel,
    p: f64,
    t_max: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloGrowth> {
    if trials == 0 {
        return Err(Error::Validation("trials must be >= 1".into()));
    }
    let trials = (0..trials as u64)
        .into_par_iter()
        .map(|k| estimate_growth_rate(g, model, p, t_max, StreamSeed::new(seed, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloGrowth { trials })
}

/// One execution of the two-run robust algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustRun {
    pub lambda_hat: Vec<f64>,
    pub second_run: Trajectory,
    pub final_estimates: Vec<f64>,
    pub true_max: f64,
    /// Mean over nodes of `final − true_max`.
    pub bias: f64,
}

/// First run from zero for `t_max` iterations yields `λ̂ᵢ`; the second run
/// starts from `x0` and subtracts each node's own `λ̂ᵢ` at every update for
/// `t2` iterations.
#[allow(clippy::too_many_arguments)]
pub fn robust_max_consensus(
    g: &Graph,
    x0: &StateVector,
    model: &NoiseModel,
    p: f64,
    t_max: usize,
    t2: usize,
    seed: u64,
    trial: u64,
) -> Result<RobustRun> {
    check_common(g, x0, p, t_max)?;
    let d = g.diameter()?;
    if t2 < d.max(1) {
        return Err(Error::Validation(format!("second-run length t2={t2} is below the diameter {d}")));
    }
    let estimate = estimate_growth_rate(g, model, p, t_max, StreamSeed::new(seed, 2 * trial))?;
    let second = run_noisy_max(
        g,
        x0,
        model,
        p,
        t2,
        StreamSeed::new(seed, 2 * trial + 1),
        Some(&estimate.lambda_hat_per_node),
    )?;
    let final_estimates = second.final_state().to_vec();
    let true_max = x0.max();
    let bias = stats::mean(&final_estimates) - true_max;
    Ok(RobustRun {
        lambda_hat: estimate.lambda_hat_per_node,
        second_run: second,
        final_estimates,
        true_max,
        bias,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_robust(
    g: &Graph,
    x0: &StateVector,
    model: &NoiseModel,
    p: f64,
    t_max: usize,
    t2: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<RobustRun>> {
    if trials == 0 {
        return Err(Error::Validation("trials must be >= 1".into()));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|k| robust_max_consensus(g, x0, model, p, t_max, t2, seed, k))
        .collect()
}

/// Aggregate of several robust runs on one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusResult {
    /// Per-node final estimate averaged over runs.
    pub final_estimates: Vec<f64>,
    pub true_max: f64,
    pub bias: f64,
    pub iteration_count: usize,
    /// Per-node variance of the final estimate across runs, averaged over nodes.
    pub variance_across_trials: f64,
    pub trials: usize,
}

impl ConsensusResult {
    pub fn from_runs(runs: &[RobustRun]) -> Result<Self> {
        let Some(first) = runs.first() else {
            return Err(Error::Validation("no completed runs to aggregate".into()));
        };
        let n = first.final_estimates.len();
        let per_node: Vec<Vec<f64>> = (0..n)
            .map(|i| runs.iter().map(|r| r.final_estimates[i]).collect())
            .collect();
        let final_estimates: Vec<f64> = per_node.iter().map(|v| stats::mean(v)).collect();
        let variance_across_trials = stats::mean(&per_node.iter().map(|v| stats::variance(v)).collect::<Vec<_>>());
        Ok(ConsensusResult {
            bias: stats::mean(&final_estimates) - first.true_max,
            final_estimates,
            true_max: first.true_max,
            iteration_count: first.second_run.t_count(),
            variance_across_trials,
            trials: runs.len(),
        })
    }
}

/// Mean over runs of the per-iteration network-mean state of the second run.
pub fn mean_second_run_series(runs: &[RobustRun]) -> Vec<f64> {
    let series: Vec<Vec<f64>> = runs.iter().map(|r| r.second_run.mean_series()).collect();
    mean_columns(&series)
}

pub(crate) fn mean_columns(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    (0..rows[0].len())
        .map(|t| rows.iter().map(|r| r[t]).sum::<f64>() / rows.len() as f64)
        .collect()
}

/// Measured end-to-end dispersion and its analytic ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndToEndVariance {
    pub variance: f64,
    pub stderr: f64,
    /// `σ²(t2²/t_max + t2)`.
    pub bound: f64,
}

/// Variance of node 0's final estimate across independent two-run
/// executions from `x0 = 0`.
pub fn end_to_end_variance(
    g: &Graph,
    model: &NoiseModel,
    p: f64,
    t_max: usize,
    t2: usize,
    trials: usize,
    seed: u64,
) -> Result<EndToEndVariance> {
    if trials < 100 {
        return Err(Error::Validation(format!("end-to-end variance needs >= 100 trials, got {trials}")));
    }
    let x0 = StateVector::zeros(g.n_nodes());
    let runs = monte_carlo_robust(g, &x0, model, p, t_max, t2, trials, seed)?;
    let finals: Vec<f64> = runs.iter().map(|r| r.final_estimates[0]).collect();
    let t2f = t2 as f64;
    Ok(EndToEndVariance {
        variance: stats::variance(&finals),
        stderr: stats::variance_std_error(&finals),
        bound: model.variance() * (t2f * t2f / t_max as f64 + t2f),
    })
}
