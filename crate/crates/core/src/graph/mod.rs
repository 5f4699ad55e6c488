//! Undirected weighted graphs, MaxCut evaluation and the exact MaxCut oracle.

mod generate;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate_regular, MAX_RESTARTS};
pub use spectrum::{jacobi_eigenvalues, spectrum, SpectrumReport, JACOBI_MAX_SWEEPS, JACOBI_TOL};

/// Largest vertex count accepted by [`brute_force_max`].
pub const BRUTE_FORCE_MAX_N: usize = 30;

/// A weighted edge with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Simple undirected weighted graph on vertices `0..n`.
///
/// Edges are stored once, with `i < j`, sorted lexicographically, so two
/// graphs with the same edge set serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    seed: Option<u64>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// On-disk form: `{"n": 5, "edges": [[0, 1, 1.0], ...], "seed": 7}`.
#[derive(Serialize, Deserialize)]
struct GraphRecord {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl TryFrom<GraphRecord> for Graph {
    type Error = Error;

    fn try_from(rec: GraphRecord) -> Result<Self> {
        let mut g = Graph::new(rec.n, rec.edges)?;
        g.seed = rec.seed;
        Ok(g)
    }
}

impl From<Graph> for GraphRecord {
    fn from(g: Graph) -> Self {
        GraphRecord {
            n: g.n,
            edges: g.edges.iter().map(|e| (e.i, e.j, e.w)).collect(),
            seed: g.seed,
        }
    }
}

impl Graph {
    /// Builds a graph from `(i, j, w)` triples. Endpoint order is normalised
    /// and the list sorted; loops, duplicates, out-of-range endpoints and
    /// non-finite weights are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation(format!("graph needs at least 2 vertices, got {n}")));
        }
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::validation(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::validation(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if !w.is_finite() {
                return Err(Error::validation(format!("edge ({a},{b}) has non-finite weight")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push(Edge { i, j, w });
        }
        list.sort_by_key(|e| (e.i, e.j));
        if let Some(pair) = list.windows(2).find(|p| (p[0].i, p[0].j) == (p[1].i, p[1].j)) {
            return Err(Error::validation(format!("duplicate edge ({},{})", pair[0].i, pair[0].j)));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &list {
            adjacency[e.i].push((e.j, e.w));
            adjacency[e.j].push((e.i, e.w));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(v, _)| v);
        }
        Ok(Graph {
            n,
            edges: list,
            seed: None,
            adjacency,
        })
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Graph::new(n, edges.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Graph::unweighted(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::validation("cycle needs at least 3 vertices"));
        }
        Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Graph::unweighted(n, (0..n - 1).map(|i| (i, i + 1)))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (1..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    /// True when all weights are integers, which makes every cut value an
    /// exact integer.
    pub fn has_integer_weights(&self) -> bool {
        self.edges.iter().all(|e| e.w.fract() == 0.0)
    }

    /// Dense row-major adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for e in &self.edges {
            a[e.i * n + e.j] = e.w;
            a[e.j * n + e.i] = e.w;
        }
        a
    }

    /// Dense row-major Laplacian `D - A` with weighted degrees.
    pub fn laplacian_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for e in &self.edges {
            l[e.i * n + e.j] -= e.w;
            l[e.j * n + e.i] -= e.w;
            l[e.i * n + e.i] += e.w;
            l[e.j * n + e.j] += e.w;
        }
        l
    }

    /// Neighbourhood bitmasks; only valid for `n <= 64`.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask view needs n <= 64");
        (0..self.n)
            .map(|v| self.adjacency[v].iter().fold(0u64, |m, &(u, _)| m | (1 << u)))
            .collect()
    }

    /// Breadth-first distances from `src`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &(u, _) in &self.adjacency[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::validation("permutation length differs from n"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::validation("not a permutation"));
            }
        }
        let mut g = Graph::new(self.n, self.edges.iter().map(|e| (perm[e.i], perm[e.j], e.w)))?;
        g.seed = self.seed;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A ±1 assignment together with its cut value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutAssignment {
    pub z: Vec<i8>,
    pub cost: f64,
}

impl CutAssignment {
    pub fn new(g: &Graph, z: Vec<i8>) -> Result<Self> {
        let cost = maxcut_cost(g, &z)?;
        Ok(CutAssignment { z, cost })
    }
}

/// Cut value `sum over edges of w_ij (1 - z_i z_j) / 2`.
pub fn maxcut_cost(g: &Graph, z: &[i8]) -> Result<f64> {
    if z.len() != g.n {
        return Err(Error::validation(format!(
            "assignment has {} entries, graph has {} vertices",
            z.len(),
            g.n
        )));
    }
    if let Some(bad) = z.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::validation(format!("assignment entry {bad} is not +1 or -1")));
    }
    Ok(cut_value_unchecked(g, z))
}

pub(crate) fn cut_value_unchecked(g: &Graph, z: &[i8]) -> f64 {
    g.edges
        .iter()
        .filter(|e| z[e.i] != z[e.j])
        .map(|e| e.w)
        .sum()
}

/// Cut value of the basis state `bits`, where bit `v` set means `z_v = -1`.
pub fn cut_value_of_bits(g: &Graph, bits: u64) -> f64 {
    g.edges
        .iter()
        .filter(|e| ((bits >> e.i) ^ (bits >> e.j)) & 1 == 1)
        .map(|e| e.w)
        .sum()
}

/// Exact MaxCut by Gray-code enumeration of the `2^(n-1)` assignments with
/// `z_0 = +1`.
pub fn brute_force_max(g: &Graph) -> Result<CutAssignment> {
    let n = g.n;
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::validation(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    let free = n - 1;
    let mut z = vec![1i8; n];
    let mut current = 0.0;
    let mut best = 0.0;
    let mut best_code = 0u64;
    for k in 1u64..(1u64 << free) {
        let v = k.trailing_zeros() as usize + 1;
        let zv = z[v];
        for &(u, w) in &g.adjacency[v] {
            if z[u] == zv {
                current += w;
            } else {
                current -= w;
            }
        }
        z[v] = -zv;
        if current > best {
            best = current;
            best_code = k ^ (k >> 1);
        }
    }
    let z: Vec<i8> = (0..n)
        .map(|v| if v > 0 && (best_code >> (v - 1)) & 1 == 1 { -1 } else { 1 })
        .collect();
    CutAssignment::new(g, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn k2() -> Graph {
        Graph::unweighted(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn cost_examples() {
        assert_eq!(maxcut_cost(&k2(), &[1, -1]).unwrap(), 1.0);
        let c4 = Graph::cycle(4).unwrap();
        assert_eq!(maxcut_cost(&c4, &[1, 1, 1, 1]).unwrap(), 0.0);
        assert_eq!(maxcut_cost(&c4, &[1, -1, 1, -1]).unwrap(), 4.0);
    }

    #[test]
    fn cost_rejects_bad_assignments() {
        let c4 = Graph::cycle(4).unwrap();
        assert!(matches!(maxcut_cost(&c4, &[1, -1]), Err(Error::Validation(_))));
        assert!(matches!(maxcut_cost(&c4, &[1, 0, 1, -1]), Err(Error::Validation(_))));
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_max(&Graph::cycle(4).unwrap()).unwrap().cost, 4.0);
        assert_eq!(brute_force_max(&Graph::complete(5).unwrap()).unwrap().cost, 6.0);
        assert_eq!(brute_force_max(&k2()).unwrap().cost, 1.0);
        let best = brute_force_max(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(best.cost, 4.0);
        assert_eq!(best.z[0], 1);
    }

    #[test]
    fn brute_force_guard() {
        let g = Graph::path(31).unwrap();
        assert!(matches!(brute_force_max(&g), Err(Error::Validation(_))));
    }

    #[test]
    fn construction_rejects_invalid_edges() {
        assert!(Graph::new(3, [(1, 1, 1.0)]).is_err());
        assert!(Graph::new(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(Graph::new(3, [(0, 3, 1.0)]).is_err());
        assert!(Graph::new(1, []).is_err());
        assert!(Graph::new(3, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn edges_are_canonical() {
        let g = Graph::unweighted(4, [(3, 2), (1, 0), (2, 0)]).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (2, 3)]);
    }

    #[test]
    fn json_format() {
        let g = Graph::unweighted(3, [(1, 2), (0, 1)]).unwrap().with_seed(9);
        let text = g.to_json();
        assert_eq!(text, r#"{"n":3,"edges":[[0,1,1.0],[1,2,1.0]],"seed":9}"#);
        assert_eq!(Graph::from_json(&text).unwrap(), g);
        assert!(Graph::from_json(r#"{"n":3,"edges":[[0,0,1.0]]}"#).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..9, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = crate::rng::seeded(seed);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(0.5) {
                        edges.push((i, j, rng.random_range(1..4) as f64));
                    }
                }
            }
            Graph::new(n, edges).unwrap()
        })
    }

    proptest! {
        #[test]
        fn cost_bounds_and_complement(g in arb_graph(), bits in any::<u64>()) {
            let z: Vec<i8> = (0..g.n()).map(|v| if (bits >> v) & 1 == 1 { -1 } else { 1 }).collect();
            let flipped: Vec<i8> = z.iter().map(|s| -s).collect();
            let c = maxcut_cost(&g, &z).unwrap();
            prop_assert!(c >= 0.0 && c <= g.total_weight());
            prop_assert_eq!(c, maxcut_cost(&g, &flipped).unwrap());
            prop_assert_eq!(c, cut_value_of_bits(&g, bits & ((1 << g.n()) - 1)));
        }

        #[test]
        fn brute_force_dominates_random_assignments(g in arb_graph(), seed in any::<u64>()) {
            let best = brute_force_max(&g).unwrap();
            let mut rng = crate::rng::seeded(seed);
            for _ in 0..1000 {
                let z: Vec<i8> = (0..g.n()).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
                prop_assert!(best.cost >= maxcut_cost(&g, &z).unwrap());
            }
        }
    }
}
