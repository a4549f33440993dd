//! Undirected communication graphs and their per-iteration edge-erased
//! realizations.
//!
//! A [`Graph`] is immutable once built. Nodes are 0-indexed; every edge is
//! stored once as an ordered pair `(u, v)` with `u < v` and carries a stable
//! edge id, which is what a [`GraphRealization`] masks.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative change in the Rayleigh quotient that ends power iteration.
const POWER_ITERATION_TOL: f64 = 1e-12;
const POWER_ITERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    /// `adjacency[i]` holds `(neighbour, edge_id)` sorted by neighbour.
    adjacency: Vec<Vec<(usize, usize)>>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Builds a connected graph; rejects self-loops, duplicates, out-of-range
    /// endpoints, and disconnected edge sets.
    pub fn new(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(n_nodes, edges, false)
    }

    /// Like [`Graph::new`] but permits a disconnected edge set.
    pub fn new_allow_disconnected(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(n_nodes, edges, true)
    }

    fn build(n_nodes: usize, edges: &[(usize, usize)], allow_disconnected: bool) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::Validation("graph needs at least one node".into()));
        }
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) references a node outside [0, {n_nodes})"
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at node {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::Validation(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        let mut adjacency = vec![Vec::new(); n_nodes];
        for (id, &(u, v)) in normalized.iter().enumerate() {
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let degrees = adjacency.iter().map(Vec::len).collect();
        let g = Graph { n_nodes, edges: normalized, adjacency, degrees };
        if !allow_disconnected && !g.is_connected() {
            return Err(Error::Disconnected(format!(
                "{} nodes, {} edges, not all reachable from node 0",
                n_nodes,
                g.edges.len()
            )));
        }
        Ok(g)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, indexed by edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Neighbours of `i` in ascending order together with the edge ids.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search_by_key(&j, |&(n, _)| n).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.degrees.windows(2).all(|w| w[0] == w[1])
    }

    /// Dense 0/1 adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n_nodes]; self.n_nodes];
        for &(u, v) in &self.edges {
            a[u][v] = 1;
            a[v][u] = 1;
        }
        a
    }

    /// Counts of nodes per degree, `hist[d]` = number of nodes of degree `d`.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.max_degree() + 1];
        for &d in &self.degrees {
            hist[d] += 1;
        }
        hist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_nodes];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &(v, _) in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Largest hop count over all node pairs, by breadth-first search from
    /// every node.
    pub fn diameter(&self) -> Result<usize> {
        let mut best = 0;
        for s in 0..self.n_nodes {
            for d in self.bfs_distances(s) {
                match d {
                    Some(d) => best = best.max(d),
                    None => {
                        return Err(Error::Disconnected(format!(
                            "node {s} cannot reach every other node; diameter is infinite"
                        )))
                    }
                }
            }
        }
        Ok(best)
    }

    /// Largest eigenvalue of the adjacency matrix.
    ///
    /// Power iteration runs on `A + I`: the spectrum is shifted by one so the
    /// Perron root strictly dominates even for bipartite graphs, where `−ρ` is
    /// also an eigenvalue of `A`.
    pub fn spectral_radius(&self) -> Result<f64> {
        let n = self.n_nodes;
        if self.edges.is_empty() {
            return Ok(0.0);
        }
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut w = vec![0.0; n];
        let mut previous = f64::NAN;
        for _ in 0..POWER_ITERATION_CAP {
            for i in 0..n {
                w[i] = v[i] + self.adjacency[i].iter().map(|&(j, _)| v[j]).sum::<f64>();
            }
            // Rayleigh quotient of the shifted matrix with the unit vector v.
            let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
            if (rayleigh - previous).abs() <= POWER_ITERATION_TOL * rayleigh.abs() {
                return Ok(rayleigh - 1.0);
            }
            previous = rayleigh;
        }
        Err(Error::Numeric(format!(
            "power iteration did not converge within {POWER_ITERATION_CAP} iterations"
        )))
    }

    /// `[Aᵗ]_{i,j}`: the number of length-`t` walks between `j` and `i`.
    pub fn adjacency_power_entry(&self, t: usize, i: usize, j: usize) -> Result<u128> {
        self.check_node(i)?;
        self.check_node(j)?;
        let mut walks = vec![0u128; self.n_nodes];
        walks[j] = 1;
        for step in 0..t {
            let mut next = vec![0u128; self.n_nodes];
            for (u, slot) in next.iter_mut().enumerate() {
                let mut acc = 0u128;
                for &(v, _) in &self.adjacency[u] {
                    acc = acc.checked_add(walks[v]).ok_or_else(|| {
                        Error::Range(format!("walk count overflows u128 at step {}", step + 1))
                    })?;
                }
                *slot = acc;
            }
            walks = next;
        }
        Ok(walks[i])
    }

    /// Number of length-`t` walks from `j` to `i` that contain exactly `l`
    /// self-loop steps: `C(t, l) · [A^{t−l}]_{i,j}`.
    pub fn count_self_loop_paths(&self, t: usize, l: usize, i: usize, j: usize) -> Result<u128> {
        if l > t {
            return Err(Error::Validation(format!("self-loop count {l} exceeds path length {t}")));
        }
        let walks = self.adjacency_power_entry(t - l, i, j)?;
        binomial(t, l)?
            .checked_mul(walks)
            .ok_or_else(|| Error::Range(format!("C({t},{l}) * walks overflows u128")))
    }

    /// Draws one iteration's surviving edges: each undirected edge is kept
    /// independently with probability `1 − p`, in both directions at once.
    pub fn sample_realization<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Result<GraphRealization<'_>> {
        check_erasure(p)?;
        let active = if p == 0.0 {
            vec![true; self.edges.len()]
        } else {
            (0..self.edges.len()).map(|_| rng.random::<f64>() >= p).collect()
        };
        Ok(GraphRealization { base: self, active })
    }

    /// The realization with every edge present.
    pub fn full_realization(&self) -> GraphRealization<'_> {
        GraphRealization { base: self, active: vec![true; self.edges.len()] }
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n_nodes {
            return Err(Error::Validation(format!("node {i} outside [0, {})", self.n_nodes)));
        }
        Ok(())
    }
}

pub(crate) fn check_erasure(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Validation(format!("erasure probability must lie in [0, 1), got {p}")));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> Result<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for step in 0..k {
        acc = acc
            .checked_mul((n - step) as u128)
            .ok_or_else(|| Error::Range(format!("C({n},{k}) overflows u128")))?
            / (step as u128 + 1);
    }
    Ok(acc)
}

/// One iteration's view of a graph after random edge erasures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphRealization<'g> {
    base: &'g Graph,
    active: Vec<bool>,
}

impl<'g> GraphRealization<'g> {
    /// Builds a realization from an explicit mask over edge ids.
    pub fn from_mask(base: &'g Graph, active: Vec<bool>) -> Result<Self> {
        if active.len() != base.edge_count() {
            return Err(Error::Shape { expected: base.edge_count(), found: active.len() });
        }
        Ok(GraphRealization { base, active })
    }

    pub fn base(&self) -> &'g Graph {
        self.base
    }

    pub fn is_active(&self, edge_id: usize) -> bool {
        self.active[edge_id]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn active_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.base.edges.iter().zip(&self.active).filter(|(_, &a)| a).map(|(&e, _)| e)
    }
}

/// Topology families used for experiments and tests.
pub mod generators {
    use super::*;

    pub fn complete(n: usize) -> Result<Graph> {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &edges)
    }

    pub fn path(n: usize) -> Result<Graph> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::new(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::Validation(format!("cycle needs at least 3 nodes, got {n}")));
        }
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Graph::new(n, &edges)
    }

    /// Hub node 0 joined to `leaves` leaf nodes.
    pub fn star(leaves: usize) -> Result<Graph> {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::new(leaves + 1, &edges)
    }

    /// Erdős–Rényi `G(n, q)`, redrawn until connected.
    pub fn gnp_connected(n: usize, q: f64, seed: u64) -> Result<Graph> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Validation(format!("edge probability must be in [0, 1], got {q}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.random::<f64>() < q)
                .collect();
            if let Ok(g) = Graph::new(n, &edges) {
                return Ok(g);
            }
        }
        Err(Error::Disconnected(format!("no connected G({n}, {q}) sample in 10000 draws")))
    }

    /// Random geometric graph on the unit square.
    ///
    /// Nodes are placed uniformly at random; two nodes are joined when their
    /// distance is at most the connection radius. The radius is the smallest
    /// one giving a connected graph, or, when `target_rho` is set, the
    /// smallest one at or above that whose spectral radius reaches the target.
    pub fn random_geometric(n: usize, seed: u64, target_rho: Option<f64>) -> Result<Graph> {
        if n < 2 {
            return Graph::new(n, &[]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                let (dx, dy) = (points[u].0 - points[v].0, points[u].1 - points[v].1);
                pairs.push(((dx * dx + dy * dy).sqrt(), u, v));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let prefix = |k: usize| -> Result<Graph> {
            let edges: Vec<_> = pairs[..k].iter().map(|&(_, u, v)| (u, v)).collect();
            Graph::new_allow_disconnected(n, &edges)
        };
        // Smallest prefix of the distance order that connects all nodes.
        let (mut lo, mut hi) = (0usize, pairs.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if prefix(mid)?.is_connected() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let mut k = lo;
        if let Some(target) = target_rho {
            if prefix(k)?.spectral_radius()? < target {
                let (mut lo, mut hi) = (k, pairs.len());
                if prefix(hi)?.spectral_radius()? < target {
                    return Err(Error::Validation(format!(
                        "spectral radius {target} unreachable with {n} nodes"
                    )));
                }
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if prefix(mid)?.spectral_radius()? >= target {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                k = lo;
            }
        }
        // Include every pair tied at the chosen radius.
        let radius = pairs[k - 1].0;
        while k < pairs.len() && pairs[k].0 <= radius {
            k += 1;
        }
        let edges: Vec<_> = pairs[..k].iter().map(|&(_, u, v)| (u, v)).collect();
        Graph::new(n, &edges)
    }
}

/// Parses the plain-text edge-list format: a header line `N E` followed by
/// `E` lines `i j`. With `one_indexed`, node labels run from 1 to N.
pub fn parse_edge_list(text: &str, one_indexed: bool) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::Validation("empty graph file".into()))?;
    let nums = parse_pair(header, 1)?;
    let (n, e) = (nums.0, nums.1);
    let offset = usize::from(one_indexed);
    let mut edges = Vec::with_capacity(e);
    for (k, line) in lines {
        let (a, b) = parse_pair(line, k + 1)?;
        if a < offset || b < offset {
            return Err(Error::Validation(format!("line {}: node 0 in a 1-indexed file", k + 1)));
        }
        edges.push((a - offset, b - offset));
    }
    if edges.len() != e {
        return Err(Error::Validation(format!("header declares {e} edges, found {}", edges.len())));
    }
    Graph::new(n, &edges)
}

fn parse_pair(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Validation(format!("line {line_no}: expected two integers, got {line:?}"))),
    }
}

/// Serializes a graph in the edge-list format accepted by [`parse_edge_list`].
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n_nodes(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
