//! Derivative-free one-dimensional search used by the rate function and
//! the bound computations.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Location and value of a maximum found by [`golden_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
///
/// Terminates when the bracket is narrower than `tol * max(1, |arg|)`. The
/// endpoints are evaluated as well, so a maximum sitting on the boundary is
/// returned exactly.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Extremum {
    debug_assert!(lo <= hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol * c.abs().max(1.0) && iterations < 500 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let mut best = if fc >= fd {
        Extremum { arg: c, value: fc }
    } else {
        Extremum { arg: d, value: fd }
    };
    for end in [lo, hi] {
        let v = f(end);
        if v > best.value {
            best = Extremum { arg: end, value: v };
        }
    }
    best
}

/// Maximum of a function that may be multimodal at coarse scale: a
/// log-spaced scan over `[lo, hi]` (`lo > 0`) followed by golden-section
/// refinement between the neighbours of the best grid point.
pub fn scan_then_golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Extremum {
    debug_assert!(lo > 0.0 && hi > lo && points >= 3);
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|k| lo * (ratio * k as f64).exp()).collect();
    let mut best_k = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (k, &g) in grid.iter().enumerate() {
        let v = f(g);
        if v > best_v {
            best_v = v;
            best_k = k;
        }
    }
    let a = grid[best_k.saturating_sub(1)];
    let b = grid[(best_k + 1).min(points - 1)];
    let refined = golden_max(&mut f, a, b, tol);
    if refined.value >= best_v {
        refined
    } else {
        Extremum { arg: grid[best_k], value: best_v }
    }
}

/// Bisection for the crossing point of a predicate that is `false` at `lo`
/// and `true` at `hi`. Returns the final `(lo, hi)` bracket.
pub fn bisect<P: FnMut(f64) -> bool>(mut holds: P, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}
