//! Small sample-statistics helpers shared by the Monte Carlo routines.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (zero for fewer than two samples).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn std_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Standard error of the sample variance, from the fourth central moment:
/// `Var(s²) ≈ (μ₄ − σ⁴ (n−3)/(n−1)) / n`.
pub fn variance_std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return f64::INFINITY;
    }
    let m = mean(xs);
    let nf = n as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / nf;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / nf;
    let v = (m4 - m2 * m2 * (nf - 3.0) / (nf - 1.0)) / nf;
    v.max(0.0).sqrt()
}

/// Least-squares slope of `ys` against `0, 1, 2, …` with its standard error.
pub fn ols_slope(ys: &[f64]) -> (f64, f64) {
    let n = ys.len();
    if n < 3 {
        return (0.0, f64::INFINITY);
    }
    let nf = n as f64;
    let xbar = (nf - 1.0) / 2.0;
    let ybar = mean(ys);
    let sxx: f64 = (0..n).map(|k| (k as f64 - xbar).powi(2)).sum();
    let sxy: f64 = ys.iter().enumerate().map(|(k, y)| (k as f64 - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let resid: f64 = ys
        .iter()
        .enumerate()
        .map(|(k, y)| (y - ybar - slope * (k as f64 - xbar)).powi(2))
        .sum();
    let se = (resid / (nf - 2.0) / sxx).sqrt();
    (slope, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        assert!((std_error(&xs) - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn slope_of_line_is_exact() {
        let ys: Vec<f64> = (0..10).map(|k| 3.0 - 0.5 * k as f64).collect();
        let (s, se) = ols_slope(&ys);
        assert!((s + 0.5).abs() < 1e-12);
        assert!(se < 1e-10);
    }
}
