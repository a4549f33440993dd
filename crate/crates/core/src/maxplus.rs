//! Max-plus semiring arithmetic and the noisy state recursion
//! `x(t+1) = W(t) ⊗ x(t)`.
//!
//! `−∞` (the semiring zero ε) is represented by `f64::NEG_INFINITY`; IEEE
//! arithmetic already gives `−∞ + a = −∞` and `max(−∞, a) = a` for finite `a`.
//!
//! Noise draws follow one fixed order everywhere in the crate, so the dense
//! matrix path and the sparse simulation step consume a random stream
//! identically:
//!
//! 1. edge noise, receivers `i` ascending, neighbours ascending, active edges only;
//! 2. self-loop noise for every node (only when enabled).

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphRealization};
use crate::noise::NoiseModel;

/// Semiring zero.
pub const EPSILON: f64 = f64::NEG_INFINITY;
/// Semiring one.
pub const UNIT: f64 = 0.0;

/// Dense square matrix over the max-plus semiring, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxPlusMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl MaxPlusMatrix {
    /// Matrix with every entry ε.
    pub fn epsilon(dim: usize) -> Self {
        MaxPlusMatrix { dim, entries: vec![EPSILON; dim * dim] }
    }

    /// Max-plus identity: e on the diagonal, ε elsewhere.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::epsilon(dim);
        for i in 0..dim {
            m.set(i, i, UNIT);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Shape { expected: dim, found: row.len() });
            }
            if row.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
                return Err(Error::Validation("max-plus entries must be real or -inf".into()));
            }
            entries.extend_from_slice(row);
        }
        Ok(MaxPlusMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    /// Comma-separated rows with ε written as `-inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            let line: Vec<String> = self.row(i).iter().map(|&v| format_entry(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split(',').map(|tok| parse_entry(tok.trim())).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}

fn format_entry(v: f64) -> String {
    if v == EPSILON {
        "-inf".to_string()
    } else {
        format!("{v:?}")
    }
}

fn parse_entry(tok: &str) -> Result<f64> {
    if tok == "-inf" {
        return Ok(EPSILON);
    }
    tok.parse::<f64>()
        .map_err(|_| Error::Validation(format!("cannot parse max-plus entry {tok:?}")))
}

/// `[X ⊗ Y]_{ij} = max_k (X_{ik} + Y_{kj})`.
pub fn mp_multiply(x: &MaxPlusMatrix, y: &MaxPlusMatrix) -> Result<MaxPlusMatrix> {
    if x.dim != y.dim {
        return Err(Error::Shape { expected: x.dim, found: y.dim });
    }
    let n = x.dim;
    let mut out = MaxPlusMatrix::epsilon(n);
    for i in 0..n {
        for k in 0..n {
            let xik = x.get(i, k);
            if xik == EPSILON {
                continue;
            }
            for j in 0..n {
                let cand = y.get(k, j) + xik;
                if cand > out.get(i, j) {
                    out.set(i, j, cand);
                }
            }
        }
    }
    Ok(out)
}

/// `W(t−1) ⊗ … ⊗ W(0)` for a sequence in time order.
pub fn mp_product(mats: &[MaxPlusMatrix]) -> Result<MaxPlusMatrix> {
    let Some(first) = mats.first() else {
        return Err(Error::Validation("product of an empty sequence".into()));
    };
    let mut acc = first.clone();
    for w in &mats[1..] {
        acc = mp_multiply(w, &acc)?;
    }
    Ok(acc)
}

/// Node states `x(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
}

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("initial states must be finite".into()));
        }
        Ok(StateVector { values })
    }

    pub fn zeros(n: usize) -> Self {
        StateVector { values: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `x'_i = max_j (W_{ij} + x_j)`.
pub fn propagate(w: &MaxPlusMatrix, x: &StateVector) -> Result<StateVector> {
    if w.dim != x.len() {
        return Err(Error::Shape { expected: w.dim, found: x.len() });
    }
    let values = (0..w.dim)
        .map(|i| {
            w.row(i)
                .iter()
                .zip(&x.values)
                .map(|(a, b)| a + b)
                .fold(EPSILON, f64::max)
        })
        .collect();
    Ok(StateVector { values })
}

/// Noise matrix for one iteration: 0 (or a self-loop draw) on the diagonal,
/// an independent draw per ordered pair on active edges, ε elsewhere.
pub fn build_noise_matrix<R: Rng + ?Sized>(
    real: &GraphRealization<'_>,
    model: &NoiseModel,
    rng: &mut R,
    self_loop_noise: bool,
) -> MaxPlusMatrix {
    fill_noise_matrix(real, model, rng, self_loop_noise, EPSILON)
}

/// Debug variant in which erased edges carry the finite penalty `−c` instead
/// of ε. As `c` grows the recursion converges to the ε version.
pub fn build_noise_matrix_finite_penalty<R: Rng + ?Sized>(
    real: &GraphRealization<'_>,
    model: &NoiseModel,
    rng: &mut R,
    self_loop_noise: bool,
    c: f64,
) -> Result<MaxPlusMatrix> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Validation(format!("penalty must be finite and positive, got {c}")));
    }
    Ok(fill_noise_matrix(real, model, rng, self_loop_noise, -c))
}

fn fill_noise_matrix<R: Rng + ?Sized>(
    real: &GraphRealization<'_>,
    model: &NoiseModel,
    rng: &mut R,
    self_loop_noise: bool,
    erased: f64,
) -> MaxPlusMatrix {
    let g = real.base();
    let n = g.n_nodes();
    let mut w = MaxPlusMatrix::epsilon(n);
    for i in 0..n {
        for &(j, eid) in g.neighbors(i) {
            let v = if real.is_active(eid) { model.sample_one(rng) } else { erased };
            w.set(i, j, v);
        }
    }
    for i in 0..n {
        let d = if self_loop_noise { model.sample_one(rng) } else { UNIT };
        w.set(i, i, d);
    }
    w
}

/// One sparse iteration of the noisy max recursion, equal bit for bit to
/// `propagate(build_noise_matrix(..), x)` on the same random stream.
pub fn noisy_max_step<R: Rng + ?Sized>(
    real: &GraphRealization<'_>,
    model: &NoiseModel,
    rng: &mut R,
    self_loop_noise: bool,
    x: &[f64],
    out: &mut [f64],
) {
    let g = real.base();
    let n = g.n_nodes();
    debug_assert!(x.len() == n && out.len() == n);
    for i in 0..n {
        let mut best = EPSILON;
        for &(j, eid) in g.neighbors(i) {
            if real.is_active(eid) {
                let cand = model.sample_one(rng) + x[j];
                if cand > best {
                    best = cand;
                }
            }
        }
        out[i] = best;
    }
    for i in 0..n {
        let own = if self_loop_noise { model.sample_one(rng) + x[i] } else { x[i] };
        if own > out[i] {
            out[i] = own;
        }
    }
}

const ORACLE_MAX_NODES: usize = 8;
const ORACLE_MAX_STEPS: usize = 8;

/// Brute-force maximum over all walks `j = k₀ → k₁ → … → k_t = i` that move
/// along graph edges or stay put, of `Σ_s W(s)[k_{s+1}, k_s]`.
///
/// Exponential in `t`; intended only for checking matrix products.
pub fn path_max_oracle(g: &Graph, mats: &[MaxPlusMatrix], i: usize, j: usize) -> Result<f64> {
    let n = g.n_nodes();
    let t = mats.len();
    if n > ORACLE_MAX_NODES || t > ORACLE_MAX_STEPS {
        return Err(Error::TooLarge(format!(
            "path oracle limited to N <= {ORACLE_MAX_NODES}, t <= {ORACLE_MAX_STEPS}; got N={n}, t={t}"
        )));
    }
    if t == 0 {
        return Err(Error::Validation("path oracle needs at least one matrix".into()));
    }
    if let Some(m) = mats.iter().find(|m| m.dim() != n) {
        return Err(Error::Shape { expected: n, found: m.dim() });
    }
    if i >= n || j >= n {
        return Err(Error::Range(format!("node index out of range for N={n}")));
    }
    fn walk(g: &Graph, mats: &[MaxPlusMatrix], step: usize, at: usize, acc: f64, target: usize) -> f64 {
        if step == mats.len() {
            return if at == target { acc } else { EPSILON };
        }
        let w = &mats[step];
        let mut best = walk(g, mats, step + 1, at, acc + w.get(at, at), target);
        for &(next, _) in g.neighbors(at) {
            best = best.max(walk(g, mats, step + 1, next, acc + w.get(next, at), target));
        }
        best
    }
    // The first term enters without a leading addition so the association
    // order matches `mp_product`.
    let w0 = &mats[0];
    let mut best = walk(g, mats, 1, j, w0.get(j, j), i);
    for &(next, _) in g.neighbors(j) {
        best = best.max(walk(g, mats, 1, next, w0.get(next, j), i));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const NEG: f64 = EPSILON;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> MaxPlusMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| if rng.random::<f64>() < 0.2 { NEG } else { (rng.random::<f64>() * 8.0).round() - 4.0 })
                    .collect()
            })
            .collect();
        MaxPlusMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn hand_product() {
        let x = MaxPlusMatrix::from_rows(&[vec![0.0, 1.0], vec![NEG, 0.0]]).unwrap();
        let y = MaxPlusMatrix::from_rows(&[vec![0.0, NEG], vec![2.0, 0.0]]).unwrap();
        let p = mp_multiply(&x, &y).unwrap();
        assert_eq!(p.to_rows(), vec![vec![3.0, 1.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 5);
        let id = MaxPlusMatrix::identity(5);
        assert_eq!(mp_multiply(&x, &id).unwrap(), x);
        assert_eq!(mp_multiply(&id, &x).unwrap(), x);
    }

    #[test]
    fn associativity_on_integer_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (a, b, c) = (random_matrix(&mut rng, 4), random_matrix(&mut rng, 4), random_matrix(&mut rng, 4));
            let left = mp_multiply(&mp_multiply(&a, &b).unwrap(), &c).unwrap();
            let right = mp_multiply(&a, &mp_multiply(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn shape_mismatch() {
        let r = mp_multiply(&MaxPlusMatrix::identity(2), &MaxPlusMatrix::identity(3));
        assert_eq!(r, Err(Error::Shape { expected: 2, found: 3 }));
        assert!(propagate(&MaxPlusMatrix::identity(2), &StateVector::zeros(3)).is_err());
        assert!(MaxPlusMatrix::from_rows(&[vec![0.0], vec![0.0]]).is_err());
    }

    #[test]
    fn hand_propagation() {
        let w = MaxPlusMatrix::from_rows(&[vec![0.0, 0.3], vec![-0.2, 0.0]]).unwrap();
        let x = StateVector::new(vec![0.0, 5.0]).unwrap();
        let y = propagate(&w, &x).unwrap();
        assert_eq!(y.values(), &[5.3, 5.0]);
        assert_eq!(propagate(&MaxPlusMatrix::identity(2), &x).unwrap(), x);
    }

    #[test]
    fn zero_noise_reaches_max_in_diameter_steps() {
        let g = generators::path(6).unwrap();
        let zero = NoiseModel::gaussian(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut x = StateVector::new(vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0]).unwrap();
        for _ in 0..g.diameter().unwrap() {
            let w = build_noise_matrix(&g.full_realization(), &zero, &mut rng, false);
            x = propagate(&w, &x).unwrap();
        }
        assert!(x.values().iter().all(|&v| v == 9.0));
    }

    #[test]
    fn noise_matrix_pattern() {
        let g = generators::path(2).unwrap();
        let m = NoiseModel::gaussian(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let w = build_noise_matrix(&g.full_realization(), &m, &mut rng, false);
        assert_eq!(w.get(0, 0), 0.0);
        assert_eq!(w.get(1, 1), 0.0);
        assert!(w.get(0, 1).is_finite() && w.get(1, 0).is_finite());
        assert_ne!(w.get(0, 1), w.get(1, 0));

        let erased = GraphRealization::from_mask(&g, vec![false]).unwrap();
        let w = build_noise_matrix(&erased, &m, &mut rng, false);
        assert_eq!(w.get(0, 1), NEG);
        assert_eq!(w.get(1, 0), NEG);

        let single = Graph::new(1, &[]).unwrap();
        let w = build_noise_matrix(&single.full_realization(), &m, &mut rng, true);
        assert_eq!(w.dim(), 1);
        assert!(w.get(0, 0).is_finite() && w.get(0, 0) != 0.0);
    }

    #[test]
    fn non_edges_are_epsilon() {
        let g = generators::star(3).unwrap();
        let m = NoiseModel::laplace(1.0).unwrap();
        let w = build_noise_matrix(&g.full_realization(), &m, &mut ChaCha8Rng::seed_from_u64(1), false);
        for i in 0..4 {
            for j in 0..4 {
                let finite = w.get(i, j).is_finite();
                assert_eq!(finite, i == j || g.has_edge(i, j));
            }
        }
    }

    #[test]
    fn finite_penalty_variant() {
        let g = generators::cycle(4).unwrap();
        let m = NoiseModel::gaussian(1.0).unwrap();
        let real = GraphRealization::from_mask(&g, vec![true, false, true, true]).unwrap();
        let a = build_noise_matrix(&real, &m, &mut ChaCha8Rng::seed_from_u64(4), false);
        let b = build_noise_matrix_finite_penalty(&real, &m, &mut ChaCha8Rng::seed_from_u64(4), false, 1e3).unwrap();
        let (u, v) = g.edges()[1];
        assert_eq!(b.get(u, v), -1e3);
        assert_eq!(a.get(u, v), NEG);
        for i in 0..4 {
            for j in 0..4 {
                if a.get(i, j).is_finite() {
                    assert_eq!(a.get(i, j), b.get(i, j));
                }
            }
        }
        assert!(build_noise_matrix_finite_penalty(&real, &m, &mut ChaCha8Rng::seed_from_u64(4), false, -1.0).is_err());
    }

    #[test]
    fn finite_penalty_converges_to_epsilon_recursion() {
        let g = generators::cycle(5).unwrap();
        let m = NoiseModel::gaussian(1.0).unwrap();
        let x0 = StateVector::new(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let run = |c: Option<f64>| {
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            let mut x = x0.clone();
            for _ in 0..20 {
                let real = g.sample_realization(0.5, &mut rng).unwrap();
                let w = match c {
                    None => build_noise_matrix(&real, &m, &mut rng, false),
                    Some(c) => build_noise_matrix_finite_penalty(&real, &m, &mut rng, false, c).unwrap(),
                };
                x = propagate(&w, &x).unwrap();
            }
            x
        };
        assert_eq!(run(Some(1e6)), run(None));
    }

    #[test]
    fn sparse_step_matches_dense() {
        let g = generators::gnp_connected(9, 0.4, 5).unwrap();
        let m = NoiseModel::uniform(2.0).unwrap();
        for flag in [false, true] {
            let mut r1 = ChaCha8Rng::seed_from_u64(99);
            let mut r2 = ChaCha8Rng::seed_from_u64(99);
            let mut dense = StateVector::new((0..9).map(|k| k as f64 * 0.7).collect()).unwrap();
            let mut sparse = dense.values().to_vec();
            let mut buf = vec![0.0; 9];
            for _ in 0..30 {
                let real = g.sample_realization(0.3, &mut r1).unwrap();
                let w = build_noise_matrix(&real, &m, &mut r1, flag);
                dense = propagate(&w, &dense).unwrap();
                let real = g.sample_realization(0.3, &mut r2).unwrap();
                noisy_max_step(&real, &m, &mut r2, flag, &sparse, &mut buf);
                std::mem::swap(&mut sparse, &mut buf);
            }
            assert_eq!(dense.values(), &sparse[..]);
        }
    }

    #[test]
    fn oracle_single_step_and_hand_case() {
        let g = generators::path(3).unwrap();
        let w0 = MaxPlusMatrix::from_rows(&[vec![0.0, 2.0, NEG], vec![-1.0, 0.0, 3.0], vec![NEG, 1.0, 0.0]]).unwrap();
        let w1 = MaxPlusMatrix::from_rows(&[vec![0.0, -2.0, NEG], vec![4.0, 0.0, -3.0], vec![NEG, 5.0, 0.0]]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(path_max_oracle(&g, &[w0.clone()], i, j).unwrap(), w0.get(i, j));
            }
        }
        // Walks from node 2 to node 0 in two steps: 2→1→0 gives 3 + (−2) = 1.
        assert_eq!(path_max_oracle(&g, &[w0.clone(), w1.clone()], 0, 2).unwrap(), 1.0);
        // Walks 0→0: stay,stay = 0; 0→1→0 = −1 + −2 = −3.
        assert_eq!(path_max_oracle(&g, &[w0.clone(), w1.clone()], 0, 0).unwrap(), 0.0);
        // Walks 0→2: 0→1→2 = −1 + 5 = 4.
        assert_eq!(path_max_oracle(&g, &[w0.clone(), w1.clone()], 2, 0).unwrap(), 4.0);
        let p = mp_product(&[w0, w1]).unwrap();
        assert_eq!(p.get(0, 2), 1.0);
        assert_eq!(p.get(2, 0), 4.0);
    }

    #[test]
    fn oracle_matches_product_on_noise() {
        let m = NoiseModel::gaussian(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=5 {
            let g = generators::gnp_connected(n, 0.5, n as u64).unwrap();
            for t in 1..=4 {
                let mats: Vec<MaxPlusMatrix> = (0..t)
                    .map(|_| {
                        let real = g.sample_realization(0.25, &mut rng).unwrap();
                        build_noise_matrix(&real, &m, &mut rng, t % 2 == 0)
                    })
                    .collect();
                let p = mp_product(&mats).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let o = path_max_oracle(&g, &mats, i, j).unwrap();
                        assert_eq!(o.to_bits(), p.get(i, j).to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_size_limit() {
        let g = generators::path(9).unwrap();
        let mats = vec![MaxPlusMatrix::identity(9)];
        assert!(matches!(path_max_oracle(&g, &mats, 0, 0), Err(Error::TooLarge(_))));
        let g = generators::path(3).unwrap();
        let mats = vec![MaxPlusMatrix::identity(3); 9];
        assert!(matches!(path_max_oracle(&g, &mats, 0, 0), Err(Error::TooLarge(_))));
    }

    #[test]
    fn monotone_in_each_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let mats: Vec<MaxPlusMatrix> = (0..3).map(|_| random_matrix(&mut rng, 4)).collect();
            let base = mp_product(&mats).unwrap();
            let k = rng.random_range(0..3);
            let (i, j) = (rng.random_range(0..4), rng.random_range(0..4));
            let mut bumped = mats.clone();
            let v = bumped[k].get(i, j);
            if v.is_finite() {
                bumped[k].set(i, j, v + rng.random::<f64>() * 3.0);
            }
            let after = mp_product(&bumped).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    assert!(after.get(a, b) >= base.get(a, b));
                }
            }
        }
    }

    #[test]
    fn self_loop_noise_raises_mean_state() {
        let g = generators::cycle(5).unwrap();
        let m = NoiseModel::gaussian(1.0).unwrap();
        let t = 10;
        let pairs = 10_000;
        let mut diffs = Vec::with_capacity(pairs);
        let mut buf = vec![0.0; 5];
        for k in 0..pairs {
            let mut finals = [0.0; 2];
            for (slot, flag) in [false, true].into_iter().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
                let mut x = vec![0.0; 5];
                for _ in 0..t {
                    noisy_max_step(&g.full_realization(), &m, &mut rng, flag, &x, &mut buf);
                    std::mem::swap(&mut x, &mut buf);
                }
                finals[slot] = x[0];
            }
            diffs.push(finals[1] - finals[0]);
        }
        let mean = crate::stats::mean(&diffs);
        let se = crate::stats::std_error(&diffs);
        assert!(mean >= -3.0 * se, "mean diff {mean} se {se}");
    }

    #[test]
    fn csv_round_trip() {
        let w = MaxPlusMatrix::from_rows(&[vec![0.0, 0.1 + 0.2], vec![NEG, -1e-300]]).unwrap();
        let text = w.to_csv();
        assert!(text.contains("-inf"));
        assert_eq!(MaxPlusMatrix::from_csv(&text).unwrap(), w);
    }
}
