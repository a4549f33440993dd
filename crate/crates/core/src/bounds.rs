//! Analytical bounds on the growth rate λ.
//!
//! Upper bounds come from a large-deviation argument over the number of
//! walks `[Aᵗ]ᵢⱼ ≤ ρᵗ`: λ is at most the smallest `x` for which
//!
//! ```text
//! sup_{0≤β≤1} [ H(β) + β log K − β I(x/β) ] < 0,    K = ρ(1−p)
//! ```
//!
//! with `H` the binary entropy in nats and `I` the noise rate function.
//! The same quantity can be written without `I` as
//! `inf_γ log(1 + K M(γ)) / γ`, which is what [`upper_bound_mgf_direct`]
//! evaluates.
//!
//! Lower bounds follow a greedy walk that always moves to the neighbour
//! with the largest incoming noise (or stays put when all are negative);
//! its expected increment per step at a degree-`d` node is `m₊(d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_erasure, Graph};
use crate::noise::{NoiseFamily, NoiseModel};
use crate::optimize::{bisect, golden_max, scan_then_golden_max};

const BETA_MIN: f64 = 1e-9;
const BETA_TOL: f64 = 1e-12;
const X_TOL: f64 = 1e-9;

/// Every bound for one (graph, noise, erasure) configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n_nodes: usize,
    pub rho: f64,
    pub p: f64,
    pub upper_ldp: f64,
    pub upper_gaussian_closed: Option<f64>,
    pub upper_alternative: f64,
    pub upper_mgf_direct: f64,
    pub upper_empirical: f64,
    pub lower: f64,
    pub beta_star: f64,
    pub phi: f64,
}

/// Binary entropy in nats, with `H(0) = H(1) = 0`.
pub fn binary_entropy(beta: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.ln() };
    term(beta) + term(1.0 - beta)
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Validation(format!("effective spectral radius must be positive and finite, got {k}")));
    }
    Ok(())
}

fn check_supported(model: &NoiseModel) -> Result<()> {
    let (lo, hi) = model.mgf_domain();
    if !(lo < 0.0 && hi > 0.0) {
        return Err(Error::Unsupported(format!("{} noise has no MGF near the origin", model.family())));
    }
    Ok(())
}

/// `sup_β [H(β) + β log K − β I(x/β)]` and its maximiser.
fn ldp_objective_sup(model: &NoiseModel, log_k: f64, x: f64) -> (f64, f64) {
    let f = |beta: f64| {
        let penalty = if x == 0.0 { 0.0 } else { beta * model.rate_function_positive(x / beta).value };
        binary_entropy(beta) + beta * log_k - penalty
    };
    let inner = golden_max(f, BETA_MIN, 1.0 - BETA_MIN, BETA_TOL);
    let at_one = f(1.0);
    if at_one > inner.value {
        (at_one, 1.0)
    } else {
        (inner.value, inner.arg)
    }
}

/// Large-deviation upper bound for fixed (`p = 0`) or erasure (`p > 0`)
/// graphs. Returns `(bound, β*)`, where β* maximises the inner objective at
/// the returned bound.
pub fn upper_bound_ldp(model: &NoiseModel, rho: f64, p: f64) -> Result<(f64, f64)> {
    check_erasure(p)?;
    check_supported(model)?;
    let k = rho * (1.0 - p);
    check_k(k)?;
    let log_k = k.ln();
    let negative = |x: f64| ldp_objective_sup(model, log_k, x).0 < 0.0;
    let mut hi = model.std_dev().max(1e-6);
    let mut guard = 0;
    while !negative(hi) {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Numeric("could not bracket the large-deviation bound".into()));
        }
    }
    let (_, x) = bisect(negative, 0.0, hi, X_TOL * hi.max(1.0));
    let beta_star = ldp_objective_sup(model, log_k, x).1;
    Ok((x, beta_star))
}

/// `sup_β √(2β(H(β) + β log ρ))`, the large-deviation bound for unit-variance
/// Gaussian noise. Returns `(bound, β*)`.
pub fn upper_bound_gaussian_closed_with_beta(rho_eff: f64) -> Result<(f64, f64)> {
    check_k(rho_eff)?;
    let log_rho = rho_eff.ln();
    let g = |beta: f64| (2.0 * beta * (binary_entropy(beta) + beta * log_rho)).max(0.0).sqrt();
    let best = golden_max(g, 0.0, 1.0, BETA_TOL);
    Ok((best.value, best.arg))
}

pub fn upper_bound_gaussian_closed(rho_eff: f64) -> Result<f64> {
    upper_bound_gaussian_closed_with_beta(rho_eff).map(|(b, _)| b)
}

/// Looser bound: the `x > 0` solving `I(x) = log(ρ + 1)`.
pub fn upper_bound_alternative(model: &NoiseModel, rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::Validation(format!("spectral radius must be >= 0, got {rho}")));
    }
    check_supported(model)?;
    let target = (rho + 1.0).ln();
    if target == 0.0 {
        return Ok(0.0);
    }
    let above = |x: f64| model.rate_function_positive(x).value >= target;
    let mut hi = model.std_dev().max(1e-6);
    let mut guard = 0;
    while !above(hi) {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Numeric("could not bracket the alternative bound".into()));
        }
    }
    let (_, x) = bisect(above, 0.0, hi, 1e-12 * hi.max(1.0));
    Ok(x)
}

/// The large-deviation bound evaluated through the MGF alone:
/// `inf_γ [H(β*) + β* log(K M(γ))]/γ` with `β* = KM/(1+KM)`.
pub fn upper_bound_mgf_direct(model: &NoiseModel, k: f64) -> Result<f64> {
    check_k(k)?;
    check_supported(model)?;
    let log_k = k.ln();
    let objective = |gamma: f64| {
        let z = log_k + model.log_mgf(gamma).unwrap_or(f64::INFINITY);
        let beta = 1.0 / (1.0 + (-z).exp());
        (binary_entropy(beta) + beta * z) / gamma
    };
    let hi = model.gamma_search_limit();
    let lo = (hi * 1e-12).min(1e-6);
    let best = scan_then_golden_max(|g| -objective(g), lo, hi, 400, 1e-12);
    Ok(-best.value)
}

/// Empirical correction `φ = 1 − 1/(2√N)`.
pub fn empirical_correction(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Validation("node count must be >= 1".into()));
    }
    Ok(1.0 - 0.5 / (n as f64).sqrt())
}

/// `λ ≥ m₊(d)` on `d`-regular graphs.
pub fn lower_bound_regular(model: &NoiseModel, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Validation("degree must be >= 1".into()));
    }
    model.m_plus(d)
}

/// Separate lower bound on `d`-regular graphs: the `d/(d+1)` noise quantile.
pub fn lower_bound_regular_quantile(model: &NoiseModel, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Validation("degree must be >= 1".into()));
    }
    model.quantile(d as f64 / (d as f64 + 1.0))
}

fn binomial_pmf(n: usize, k: usize, q: f64) -> f64 {
    // C(n, k) q^k (1−q)^(n−k), built multiplicatively.
    let mut c = 1.0;
    for m in 0..k {
        c *= (n - m) as f64 / (m + 1) as f64;
    }
    c * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32)
}

/// Degree-weighted lower bound `Σᵢ (dᵢ/2E) E[m₊(Zᵢ)]` with
/// `Zᵢ ~ Binomial(dᵢ, 1−p)` (so `Zᵢ = dᵢ` when `p = 0`).
pub fn lower_bound_irregular(model: &NoiseModel, g: &Graph, p: f64) -> Result<f64> {
    check_erasure(p)?;
    if !g.is_connected() {
        return Err(Error::Disconnected("lower bound needs a connected graph".into()));
    }
    let two_e = 2 * g.edge_count();
    if two_e == 0 {
        return Ok(0.0);
    }
    let max_d = g.max_degree();
    let m: Vec<f64> = (0..=max_d).map(|d| model.m_plus(d)).collect::<Result<_>>()?;
    let mut per_degree = vec![0.0; max_d + 1];
    for d in 1..=max_d {
        per_degree[d] = if p == 0.0 {
            m[d]
        } else {
            (1..=d).map(|k| binomial_pmf(d, k, 1.0 - p) * m[k]).sum()
        };
    }
    Ok(g.degrees()
        .iter()
        .map(|&d| d as f64 / two_e as f64 * per_degree[d])
        .sum())
}

/// All bounds for one configuration. Upper bounds use `K = ρ(1−p)`.
pub fn compute_bounds_report(model: &NoiseModel, g: &Graph, p: f64) -> Result<BoundsReport> {
    check_erasure(p)?;
    let rho = g.spectral_radius()?;
    let k = rho * (1.0 - p);
    let (upper_ldp, beta_star) = upper_bound_ldp(model, rho, p)?;
    let upper_gaussian_closed = match model.family() {
        NoiseFamily::Gaussian => Some(model.std_dev() * upper_bound_gaussian_closed(k)?),
        _ => None,
    };
    let upper_alternative = upper_bound_alternative(model, k)?;
    let upper_mgf_direct = upper_bound_mgf_direct(model, k)?;
    let phi = empirical_correction(g.n_nodes())?;
    let lower = lower_bound_irregular(model, g, p)?;
    Ok(BoundsReport {
        n_nodes: g.n_nodes(),
        rho,
        p,
        upper_ldp,
        upper_gaussian_closed,
        upper_alternative,
        upper_mgf_direct,
        upper_empirical: phi * upper_ldp,
        lower,
        beta_star,
        phi,
    })
}
