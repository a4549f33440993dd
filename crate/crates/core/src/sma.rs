//! Soft-max average consensus baseline.
//!
//! A minimal surrogate: nodes run linear average consensus with Metropolis
//! weights on `yᵢ = e^{β xᵢ}`, every received message carries additive link
//! noise, and node `i` reports `(1/β) log(N yᵢ)`. In the noiseless limit the
//! report converges to `smax(x) = (1/β) log Σ e^{β xᵢ}`, which lies in
//! `[max x, max x + log(N)/β]`.

use crate::consensus::{config_fingerprint, StreamSeed, Trajectory};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::maxplus::StateVector;
use crate::noise::NoiseModel;

/// Label attached to every output produced by this module.
pub const SMA_LABEL: &str = "baseline-surrogate";

/// `(1/β) log Σ e^{β xᵢ}`, computed with a max shift.
pub fn soft_max(x: &[f64], beta: f64) -> f64 {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + x.iter().map(|v| (beta * (v - m)).exp()).sum::<f64>().ln() / beta
}

/// Metropolis weights `w_ij = 1/(1 + max(dᵢ, dⱼ))`, `w_ii = 1 − Σⱼ w_ij`,
/// listed per node in neighbour order.
pub fn metropolis_weights(g: &Graph) -> (Vec<Vec<f64>>, Vec<f64>) {
    let off: Vec<Vec<f64>> = (0..g.n_nodes())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|&(j, _)| 1.0 / (1.0 + g.degree(i).max(g.degree(j)) as f64))
                .collect()
        })
        .collect();
    let diag = off.iter().map(|w| 1.0 - w.iter().sum::<f64>()).collect();
    (off, diag)
}

/// Runs `T` noisy averaging steps and returns the per-node reconstructed
/// estimates `(1/β) log(N yᵢ(t))` for `t = 0..=T`.
///
/// Values are kept relative to `s = max x(0)` (`ỹ = e^{β(x−s)}`, noise scaled
/// by `e^{−βs}`) so large `β x` never overflows. A non-positive `ỹ` is
/// clamped to the smallest positive double before the logarithm.
pub fn run_sma_baseline(
    g: &Graph,
    x0: &StateVector,
    model: &NoiseModel,
    beta: f64,
    t: usize,
    seed: StreamSeed,
) -> Result<Trajectory> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Validation(format!("soft-max beta must be positive, got {beta}")));
    }
    if t == 0 {
        return Err(Error::Validation("iteration count must be >= 1".into()));
    }
    let n = g.n_nodes();
    if x0.len() != n {
        return Err(Error::Shape { expected: n, found: x0.len() });
    }
    let s = x0.max();
    let noise_scale = (-beta * s).exp();
    let (off, diag) = metropolis_weights(g);
    let ln_n = (n as f64).ln();
    let report = |y: &[f64]| -> Vec<f64> {
        y.iter()
            .map(|&v| s + (v.max(f64::MIN_POSITIVE).ln() + ln_n) / beta)
            .collect()
    };
    let mut y: Vec<f64> = x0.values().iter().map(|&x| (beta * (x - s)).exp()).collect();
    let mut next = vec![0.0; n];
    let mut rng = seed.rng();
    let mut states = Vec::with_capacity(t + 1);
    states.push(report(&y));
    for _ in 0..t {
        for i in 0..n {
            let mut acc = diag[i] * y[i];
            for (k, &(j, _)) in g.neighbors(i).iter().enumerate() {
                let received = y[j] + noise_scale * model.sample_one(&mut rng);
                acc += off[i][k] * received;
            }
            next[i] = acc;
        }
        std::mem::swap(&mut y, &mut next);
        states.push(report(&y));
    }
    Ok(Trajectory::from_states(states, config_fingerprint(g, model, 0.0, seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;

    #[test]
    fn soft_max_bounds() {
        let x = [0.1, 0.7, 0.3, 0.69];
        for beta in [0.5, 6.0, 10.0, 100.0] {
            let s = soft_max(&x, beta);
            assert!(s >= 0.7);
            assert!(s - 0.7 <= (4f64).ln() / beta + 1e-15);
        }
        assert!((soft_max(&[1e3, 1e3], 50.0) - (1e3 + 2f64.ln() / 50.0)).abs() < 1e-9);
    }

    #[test]
    fn weights_are_doubly_stochastic() {
        let g = generators::star(5).unwrap();
        let (off, diag) = metropolis_weights(&g);
        for i in 0..g.n_nodes() {
            assert!((diag[i] + off[i].iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(diag[i] >= 0.0);
        }
        // Symmetry: w_ij = w_ji.
        for i in 0..g.n_nodes() {
            for (k, &(j, _)) in g.neighbors(i).iter().enumerate() {
                let back = g.neighbors(j).iter().position(|&(m, _)| m == i).unwrap();
                assert_eq!(off[i][k], off[j][back]);
            }
        }
    }

    #[test]
    fn complete_graph_averages_in_one_step() {
        // Metropolis weights on K_n are exactly 1/n, so one noiseless step is the average.
        let g = generators::complete(5).unwrap();
        let x0 = StateVector::new(vec![0.2, 1.5, 0.9, 1.1, 0.0]).unwrap();
        let zero = NoiseModel::gaussian(0.0).unwrap();
        let tr = run_sma_baseline(&g, &x0, &zero, 6.0, 1, StreamSeed::new(0, 0)).unwrap();
        let target = soft_max(x0.values(), 6.0);
        assert!(tr.state(1).iter().all(|&v| (v - target).abs() < 1e-12));
    }

    #[test]
    fn noiseless_sma_converges_to_soft_max() {
        let g = generators::cycle(8).unwrap();
        let x0 = StateVector::new((0..8).map(|k| k as f64 / 7.0).collect()).unwrap();
        let zero = NoiseModel::gaussian(0.0).unwrap();
        let tr = run_sma_baseline(&g, &x0, &zero, 10.0, 400, StreamSeed::new(0, 0)).unwrap();
        let target = soft_max(x0.values(), 10.0);
        assert!(tr.final_state().iter().all(|&v| (v - target).abs() < 1e-6));
    }

    #[test]
    fn huge_states_do_not_overflow() {
        let g = generators::path(3).unwrap();
        let x0 = StateVector::new(vec![1e4, 1e4 + 1.0, 1e4 - 1.0]).unwrap();
        let m = NoiseModel::gaussian(1.0).unwrap();
        let tr = run_sma_baseline(&g, &x0, &m, 10.0, 20, StreamSeed::new(1, 0)).unwrap();
        assert!(tr.states().iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn rejects_bad_beta() {
        let g = generators::path(3).unwrap();
        let m = NoiseModel::gaussian(1.0).unwrap();
        assert!(run_sma_baseline(&g, &StateVector::zeros(3), &m, 0.0, 5, StreamSeed::new(0, 0)).is_err());
    }
}
