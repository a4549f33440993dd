//! Zero-mean link-noise distributions and the analytic quantities the growth
//! rate bounds are built from: moment generating function, Cramér rate
//! function, the expected maximum of `d` samples and zero, and the
//! all-negative probability.
//!
//! Every family is parameterised by its variance σ²:
//!
//! | family   | parameter            | MGF domain       |
//! |----------|----------------------|------------------|
//! | Gaussian | σ                    | ℝ                |
//! | Laplace  | b = σ/√2             | (−1/b, 1/b)      |
//! | Uniform  | support [−a, a], a = √3 σ | ℝ           |

use std::fmt;

use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::optimize::golden_max;
use crate::quadrature::integrate;

/// Cap on the search interval for γ when the MGF exists everywhere.
const GAMMA_CAP: f64 = 1e6;
/// Tail mass beyond which unbounded supports are truncated for quadrature.
const TAIL_MASS: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFamily {
    Gaussian,
    Laplace,
    Uniform,
}

impl NoiseFamily {
    pub const ALL: [NoiseFamily; 3] = [NoiseFamily::Gaussian, NoiseFamily::Laplace, NoiseFamily::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            NoiseFamily::Gaussian => "gaussian",
            NoiseFamily::Laplace => "laplace",
            NoiseFamily::Uniform => "uniform",
        }
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NoiseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(NoiseFamily::Gaussian),
            "laplace" => Ok(NoiseFamily::Laplace),
            "uniform" => Ok(NoiseFamily::Uniform),
            other => Err(Error::Validation(format!("unknown noise family {other:?}"))),
        }
    }
}

/// A zero-mean noise law with variance σ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    family: NoiseFamily,
    variance: f64,
}

/// Result of evaluating the rate function `I(x) = sup_{γ>0} (xγ − log M(γ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctionValue {
    pub x: f64,
    pub value: f64,
    pub maximizer_gamma: f64,
}

impl NoiseModel {
    pub fn new(family: NoiseFamily, variance: f64) -> Result<Self> {
        if !(variance.is_finite() && variance >= 0.0) {
            return Err(Error::Validation(format!("noise variance must be finite and >= 0, got {variance}")));
        }
        Ok(NoiseModel { family, variance })
    }

    pub fn gaussian(variance: f64) -> Result<Self> {
        Self::new(NoiseFamily::Gaussian, variance)
    }

    pub fn laplace(variance: f64) -> Result<Self> {
        Self::new(NoiseFamily::Laplace, variance)
    }

    pub fn uniform(variance: f64) -> Result<Self> {
        Self::new(NoiseFamily::Uniform, variance)
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.variance == 0.0
    }

    /// The family's natural scale: σ, the Laplace `b`, or the uniform half-width `a`.
    pub fn scale(&self) -> f64 {
        let s = self.std_dev();
        match self.family {
            NoiseFamily::Gaussian => s,
            NoiseFamily::Laplace => s / std::f64::consts::SQRT_2,
            NoiseFamily::Uniform => 3f64.sqrt() * s,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if self.is_degenerate() {
            return if x == 0.0 { f64::INFINITY } else { 0.0 };
        }
        let s = self.scale();
        match self.family {
            NoiseFamily::Gaussian => (-0.5 * (x / s).powi(2)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt()),
            NoiseFamily::Laplace => (-x.abs() / s).exp() / (2.0 * s),
            NoiseFamily::Uniform => {
                if x.abs() <= s {
                    0.5 / s
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if self.is_degenerate() {
            return if x < 0.0 { 0.0 } else { 1.0 };
        }
        let s = self.scale();
        match self.family {
            NoiseFamily::Gaussian => 0.5 * erfc(-x / (s * std::f64::consts::SQRT_2)),
            NoiseFamily::Laplace => {
                if x < 0.0 {
                    0.5 * (x / s).exp()
                } else {
                    1.0 - 0.5 * (-x / s).exp()
                }
            }
            NoiseFamily::Uniform => ((x + s) / (2.0 * s)).clamp(0.0, 1.0),
        }
    }

    /// Inverse CDF on the open interval `(0, 1)`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {q}")));
        }
        let s = self.scale();
        Ok(match self.family {
            NoiseFamily::Gaussian => {
                let x = -std::f64::consts::SQRT_2 * s * erfc_inv(2.0 * q);
                // One Newton step polishes the inverse-erfc approximation.
                let dens = self.pdf(x);
                if dens > 0.0 && dens.is_finite() {
                    x - (self.cdf(x) - q) / dens
                } else {
                    x
                }
            }
            NoiseFamily::Laplace => {
                if q < 0.5 {
                    s * (2.0 * q).ln()
                } else {
                    -s * (2.0 - 2.0 * q).ln()
                }
            }
            NoiseFamily::Uniform => s * (2.0 * q - 1.0),
        })
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = self.scale();
        match self.family {
            NoiseFamily::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                s * z
            }
            NoiseFamily::Laplace => {
                let u: f64 = rng.sample(Open01);
                if u < 0.5 {
                    s * (2.0 * u).ln()
                } else {
                    -s * (2.0 - 2.0 * u).ln()
                }
            }
            NoiseFamily::Uniform => s * (2.0 * rng.random::<f64>() - 1.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    /// Open interval of γ on which `M(γ)` is finite.
    pub fn mgf_domain(&self) -> (f64, f64) {
        match self.family {
            NoiseFamily::Laplace if !self.is_degenerate() => {
                let edge = 1.0 / self.scale();
                (-edge, edge)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn in_mgf_domain(&self, gamma: f64) -> bool {
        let (lo, hi) = self.mgf_domain();
        gamma > lo && gamma < hi
    }

    /// `log M(γ)`, evaluated without overflow for large |γ|.
    pub fn log_mgf(&self, gamma: f64) -> Result<f64> {
        if !self.in_mgf_domain(gamma) {
            let (lo, hi) = self.mgf_domain();
            return Err(Error::Domain(format!("gamma {gamma} outside MGF domain ({lo}, {hi})")));
        }
        Ok(self.log_mgf_inside(gamma))
    }

    pub fn mgf(&self, gamma: f64) -> Result<f64> {
        self.log_mgf(gamma).map(f64::exp)
    }

    fn log_mgf_inside(&self, gamma: f64) -> f64 {
        let s = self.scale();
        match self.family {
            NoiseFamily::Gaussian => 0.5 * (s * gamma).powi(2),
            NoiseFamily::Laplace => -(1.0 - (s * gamma).powi(2)).ln(),
            NoiseFamily::Uniform => {
                // log(sinh(y) / y)
                let y = (s * gamma).abs();
                if y < 1e-4 {
                    y * y / 6.0
                } else {
                    y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2 - y.ln()
                }
            }
        }
    }

    /// Upper end of the γ interval searched when maximising over γ > 0.
    pub fn gamma_search_limit(&self) -> f64 {
        let (lo, hi) = self.mgf_domain();
        if hi.is_finite() {
            let margin = 1e-9 * (hi - lo);
            (hi - margin).min(GAMMA_CAP)
        } else {
            GAMMA_CAP
        }
    }

    /// Cramér rate function for the right tail, `x ≥ 0`.
    ///
    /// The objective `xγ − log M(γ)` is concave in γ, so golden-section
    /// search over `(0, γ_max]` finds the supremum. When the supremum is only
    /// approached at the edge of the MGF domain the value at `γ_max` is
    /// returned.
    pub fn rate_function(&self, x: f64) -> Result<RateFunctionValue> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("rate function needs x >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(RateFunctionValue { x, value: 0.0, maximizer_gamma: 0.0 });
        }
        Ok(self.rate_function_positive(x))
    }

    /// Rate function for `x > 0`, skipping validation. Used in inner loops.
    pub(crate) fn rate_function_positive(&self, x: f64) -> RateFunctionValue {
        let hi = self.gamma_search_limit();
        let best = golden_max(|g| x * g - self.log_mgf_inside(g), 0.0, hi, 1e-12);
        RateFunctionValue { x, value: best.value.max(0.0), maximizer_gamma: best.arg }
    }

    fn support_limits(&self) -> (f64, f64) {
        match self.family {
            NoiseFamily::Uniform => (-self.scale(), self.scale()),
            _ => {
                let edge = self.quantile(1.0 - TAIL_MASS).unwrap_or(0.0);
                (-edge, edge)
            }
        }
    }

    /// `m₊(d) = E[max(0, V₁, …, V_d)] = d ∫₀^∞ x F(x)^{d−1} f(x) dx`.
    pub fn m_plus(&self, d: usize) -> Result<f64> {
        if d == 0 || self.is_degenerate() {
            return Ok(0.0);
        }
        let (_, upper) = self.support_limits();
        let df = d as f64;
        let integrand = |x: f64| df * x * self.cdf(x).powi(d as i32 - 1) * self.pdf(x);
        integrate(integrand, 0.0, upper, QUAD_TOL)
    }

    /// Probability that `d` independent noise samples are all negative, `F(0)^d`.
    pub fn kappa(&self, d: usize) -> Result<f64> {
        if d == 0 {
            return Err(Error::Validation("kappa needs degree d >= 1".into()));
        }
        Ok(self.cdf(0.0).powi(d as i32))
    }
}
