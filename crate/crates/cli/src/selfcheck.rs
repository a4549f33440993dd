//! Fast invariant suite behind `maxcons selfcheck`.

use maxcons::bounds::{compute_bounds_report, upper_bound_gaussian_closed, upper_bound_ldp};
use maxcons::consensus::{run_noisy_max, StreamSeed};
use maxcons::graph::generators;
use maxcons::maxplus::{build_noise_matrix, mp_product, path_max_oracle};
use maxcons::quadrature::integrate;
use maxcons::{stats, MaxPlusMatrix, NoiseFamily, NoiseModel, StateVector};

/// Faults that can be injected to confirm the suite detects them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Sample noise at 1.5× the declared variance.
    VarianceMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfcheckReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn render(&self) -> String {
        self.outcomes
            .iter()
            .map(|o| format!("{} {}: {}\n", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail))
            .collect()
    }
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> CheckOutcome {
    match f() {
        Ok(detail) => CheckOutcome { name, passed: true, detail },
        Err(detail) => CheckOutcome { name, passed: false, detail },
    }
}

fn oracle_equivalence() -> Result<String, String> {
    let m = NoiseModel::gaussian(1.0).map_err(|e| e.to_string())?;
    let mut rng = StreamSeed::new(101, 0).rng();
    let mut compared = 0;
    for n in 2..=6 {
        let g = generators::gnp_connected(n, 0.5, n as u64).map_err(|e| e.to_string())?;
        for t in 1..=4 {
            let mats: Vec<MaxPlusMatrix> = (0..t)
                .map(|_| {
                    let real = g.sample_realization(0.3, &mut rng).expect("valid erasure");
                    build_noise_matrix(&real, &m, &mut rng, false)
                })
                .collect();
            let p = mp_product(&mats).map_err(|e| e.to_string())?;
            for i in 0..n {
                for j in 0..n {
                    let o = path_max_oracle(&g, &mats, i, j).map_err(|e| e.to_string())?;
                    if o.to_bits() != p.get(i, j).to_bits() {
                        return Err(format!("N={n} t={t} ({i},{j}): oracle {o} vs product {}", p.get(i, j)));
                    }
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} entries identical"))
}

fn walk_count_bound() -> Result<String, String> {
    for s in 0..10u64 {
        let g = generators::gnp_connected(8, 0.4, 200 + s).map_err(|e| e.to_string())?;
        let rho = g.spectral_radius().map_err(|e| e.to_string())?;
        for t in 1..=8 {
            for i in 0..8 {
                for j in 0..8 {
                    let a = g.adjacency_power_entry(t, i, j).map_err(|e| e.to_string())? as f64;
                    if a > rho.powi(t as i32) + 1e-6 {
                        return Err(format!("graph {s}: [A^{t}]_({i},{j}) = {a} > rho^t"));
                    }
                }
            }
        }
    }
    Ok("10 graphs, t <= 8".into())
}

fn bound_orderings() -> Result<String, String> {
    let g = generators::gnp_connected(8, 0.5, 42).map_err(|e| e.to_string())?;
    for f in NoiseFamily::ALL {
        let m = NoiseModel::new(f, 1.0).map_err(|e| e.to_string())?;
        for p in [0.0, 0.5] {
            let r = compute_bounds_report(&m, &g, p).map_err(|e| e.to_string())?;
            if r.upper_alternative < r.upper_ldp - 1e-6 {
                return Err(format!("{f} p={p}: alternative below large-deviation bound"));
            }
            if (r.upper_mgf_direct - r.upper_ldp).abs() > 2e-3 {
                return Err(format!("{f} p={p}: mgf-direct {} vs {}", r.upper_mgf_direct, r.upper_ldp));
            }
            if r.rho * (1.0 - p) >= 1.0 && r.lower > r.upper_ldp {
                return Err(format!("{f} p={p}: lower {} above upper {}", r.lower, r.upper_ldp));
            }
        }
    }
    Ok("3 families x 2 erasure levels".into())
}

fn gaussian_closed_form() -> Result<String, String> {
    let m = NoiseModel::gaussian(1.0).map_err(|e| e.to_string())?;
    for rho in [2.0, 10.0, 30.56] {
        let (ldp, _) = upper_bound_ldp(&m, rho, 0.0).map_err(|e| e.to_string())?;
        let closed = upper_bound_gaussian_closed(rho).map_err(|e| e.to_string())?;
        if (ldp - closed).abs() > 1e-3 {
            return Err(format!("rho={rho}: {ldp} vs {closed}"));
        }
    }
    Ok("rho in {2, 10, 30.56}".into())
}

fn noise_variance(fault: Option<Fault>) -> Result<String, String> {
    let mut worst = 0.0f64;
    for f in NoiseFamily::ALL {
        let declared = NoiseModel::new(f, 1.0).map_err(|e| e.to_string())?;
        let sampler = match fault {
            Some(Fault::VarianceMismatch) => NoiseModel::new(f, 1.5).map_err(|e| e.to_string())?,
            None => declared,
        };
        let mut rng = StreamSeed::new(303, 0).rng();
        let xs = sampler.sample(&mut rng, 200_000);
        let v = stats::variance(&xs);
        let se = stats::variance_std_error(&xs);
        let z = (v - declared.variance()) / se;
        worst = worst.max(z.abs());
        if z.abs() > 5.0 {
            return Err(format!("{f}: sample variance {v:.4} vs declared {}", declared.variance()));
        }
    }
    Ok(format!("max |z| = {worst:.2}"))
}

fn m_plus_quadrature() -> Result<String, String> {
    for f in NoiseFamily::ALL {
        let m = NoiseModel::new(f, 1.0).map_err(|e| e.to_string())?;
        let hi = if f == NoiseFamily::Uniform { 3f64.sqrt() } else { 40.0 };
        for d in [1usize, 4, 12] {
            let tail = integrate(|x| 1.0 - m.cdf(x).powi(d as i32), 0.0, hi, 1e-12).map_err(|e| e.to_string())?;
            let direct = m.m_plus(d).map_err(|e| e.to_string())?;
            if (tail - direct).abs() > 1e-8 {
                return Err(format!("{f} d={d}: {direct} vs {tail}"));
            }
        }
    }
    Ok("3 families, d in {1, 4, 12}".into())
}

fn determinism() -> Result<String, String> {
    let g = generators::cycle(7).map_err(|e| e.to_string())?;
    let m = NoiseModel::laplace(1.0).map_err(|e| e.to_string())?;
    let x0 = StateVector::zeros(7);
    let a = run_noisy_max(&g, &x0, &m, 0.3, 50, StreamSeed::new(5, 1), None).map_err(|e| e.to_string())?;
    let b = run_noisy_max(&g, &x0, &m, 0.3, 50, StreamSeed::new(5, 1), None).map_err(|e| e.to_string())?;
    if a != b {
        return Err("identical seeds produced different trajectories".into());
    }
    Ok(a.fingerprint()[..16].to_string())
}

pub fn run_selfcheck(fault: Option<Fault>) -> SelfcheckReport {
    SelfcheckReport {
        outcomes: vec![
            check("oracle-equivalence", oracle_equivalence),
            check("walk-count-bound", walk_count_bound),
            check("bound-orderings", bound_orderings),
            check("gaussian-closed-form", gaussian_closed_form),
            check("noise-variance", || noise_variance(fault)),
            check("m-plus-quadrature", m_plus_quadrature),
            check("determinism", determinism),
        ],
    }
}
