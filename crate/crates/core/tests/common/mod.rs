//! Independent reference implementations shared by the integration tests.
//! Everything here is deliberately naive.

#![allow(dead_code)]

pub mod parity;

use maxcut_select::graph::Graph;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

/// Maximum cut by evaluating every one of the 2^n assignments.
pub fn naive_max_cut(g: &Graph) -> f64 {
    let n = g.n();
    let mut best = f64::NEG_INFINITY;
    for bits in 0u64..(1 << n) {
        let z: Vec<f64> = (0..n).map(|v| if bits >> v & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let c: f64 = g.edges().iter().map(|e| e.w * (1.0 - z[e.i] * z[e.j]) / 2.0).sum();
        best = best.max(c);
    }
    best
}

/// Random connected graph: a random spanning tree plus each other pair with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, weighted: bool, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    let tree: std::collections::HashSet<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if tree.contains(&(i, j)) || rng.random_bool(p) {
                let w = if weighted { rng.random_range(1..=3) as f64 } else { 1.0 };
                edges.push((i, j, w));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn dense_eigenvalues_desc(m: Vec<f64>, n: usize) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &m)).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn adjacency_lists(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| g.neighbors(v).iter().map(|&(u, _)| u).collect()).collect()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
}

pub fn naive_independence(g: &Graph) -> usize {
    let adj = adjacency_lists(g);
    subsets(g.n())
        .filter(|s| s.iter().all(|&a| s.iter().all(|b| !adj[a].contains(b))))
        .map(|s| s.len())
        .max()
        .unwrap()
}

pub fn naive_matching(g: &Graph) -> usize {
    fn go(edges: &[(usize, usize)], used: &mut Vec<bool>) -> usize {
        let Some((&(a, b), rest)) = edges.split_first() else { return 0 };
        let skip = go(rest, used);
        if used[a] || used[b] {
            return skip;
        }
        used[a] = true;
        used[b] = true;
        let take = 1 + go(rest, used);
        used[a] = false;
        used[b] = false;
        skip.max(take)
    }
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.i, e.j)).collect();
    go(&edges, &mut vec![false; g.n()])
}

/// Floyd-Warshall on unit lengths.
pub fn naive_diameter(g: &Graph) -> usize {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for e in g.edges() {
        d[e.i][e.j] = 1;
        d[e.j][e.i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d.iter().flatten().copied().max().unwrap()
}

fn dominated_by(adj: &[Vec<usize>], s: &[usize]) -> Vec<bool> {
    let mut on = vec![false; adj.len()];
    for &v in s {
        on[v] = true;
        for &u in &adj[v] {
            on[u] = true;
        }
    }
    on
}

fn forcing_closure(adj: &[Vec<usize>], mut filled: Vec<bool>) -> Vec<bool> {
    loop {
        let mut changed = false;
        for v in 0..adj.len() {
            if !filled[v] {
                continue;
            }
            let open: Vec<usize> = adj[v].iter().copied().filter(|&u| !filled[u]).collect();
            if open.len() == 1 {
                filled[open[0]] = true;
                changed = true;
            }
        }
        if !changed {
            return filled;
        }
    }
}

fn smallest(g: &Graph, ok: impl Fn(&[usize]) -> bool) -> usize {
    subsets(g.n()).filter(|s| ok(s)).map(|s| s.len()).min().unwrap()
}

pub fn naive_domination(g: &Graph) -> usize {
    let adj = adjacency_lists(g);
    smallest(g, |s| dominated_by(&adj, s).iter().all(|&b| b))
}

pub fn naive_zero_forcing(g: &Graph) -> usize {
    let adj = adjacency_lists(g);
    smallest(g, |s| {
        let mut filled = vec![false; g.n()];
        s.iter().for_each(|&v| filled[v] = true);
        forcing_closure(&adj, filled).iter().all(|&b| b)
    })
}

pub fn naive_power_domination(g: &Graph) -> usize {
    let adj = adjacency_lists(g);
    smallest(g, |s| forcing_closure(&adj, dominated_by(&adj, s)).iter().all(|&b| b))
}

/// QAOA state by dense 2^n x 2^n matrices: the cost phase is a diagonal
/// matrix and the mixer is the Kronecker product of single-qubit rotations.
/// Bit `v` of the basis index set means `z_v = -1`.
pub fn dense_qaoa_state(g: &Graph, gammas: &[f64], betas: &[f64]) -> Vec<Complex64> {
    let n = g.n();
    let dim = 1usize << n;
    let cost: Vec<f64> = (0..dim)
        .map(|b| {
            g.edges()
                .iter()
                .map(|e| if (b >> e.i & 1) != (b >> e.j & 1) { e.w } else { 0.0 })
                .sum()
        })
        .collect();
    let half_w = g.total_weight() / 2.0;
    let mut psi = DMatrix::from_element(dim, 1, Complex64::new((dim as f64).powf(-0.5), 0.0));
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        let phase = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            cost.iter().map(|c| Complex64::from_polar(1.0, -gamma * (half_w - c))),
        ));
        let (c, s) = (beta.cos(), beta.sin());
        let rx = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(c, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, -s),
            Complex64::new(c, 0.0),
        ]);
        let mut mixer = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for _ in 0..n {
            mixer = rx.kronecker(&mixer);
        }
        psi = &mixer * (&phase * psi);
    }
    psi.iter().copied().collect()
}

pub fn dense_expectation(g: &Graph, gammas: &[f64], betas: &[f64]) -> f64 {
    let psi = dense_qaoa_state(g, gammas, betas);
    psi.iter()
        .enumerate()
        .map(|(b, a)| {
            let c: f64 = g
                .edges()
                .iter()
                .map(|e| if (b >> e.i & 1) != (b >> e.j & 1) { e.w } else { 0.0 })
                .sum();
            a.norm_sqr() * c
        })
        .sum()
}

/// All twenty features recomputed from scratch: dense eigensolve for the
/// spectra, all-subsets search for set numbers, and a recount over the stored
/// SDP factor for the relaxation columns. The factor itself is checked
/// against `L L^T = V V^T + jitter I` before it is trusted.
pub fn naive_features(g: &Graph, est: &maxcut_select::gw::GwEstimate) -> Vec<f64> {
    let n = g.n();
    let m = g.num_edges() as f64;
    let lap = dense_eigenvalues_desc(g.laplacian_matrix_naive(), n);
    let degree = (0..n).map(|v| g.neighbors(v).len()).max().unwrap() as f64;
    let mut out = vec![2.0 * m / (n * (n - 1)) as f64];
    out.extend(lap[..5].iter().map(|l| (l / degree).ln()));
    out.push((lap[0] / lap[1]).ln());
    out.push(lap[n - 2]);
    out.push(naive_independence(g) as f64 / m);
    out.push(naive_matching(g) as f64 / m);
    out.push(naive_diameter(g) as f64 / m);
    out.push(naive_domination(g) as f64 / n as f64);
    out.push(naive_zero_forcing(g) as f64 / n as f64);
    out.push(naive_power_domination(g) as f64 / m);

    let sdp = &est.sdp;
    let v = &sdp.vectors;
    let l = &sdp.cholesky_lower;
    for i in 0..n {
        for j in 0..n {
            let llt: f64 = (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum();
            let vvt: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
            let shift = if i == j { sdp.jitter } else { 0.0 };
            assert!((llt - vvt - shift).abs() < 1e-9, "factor mismatch at ({i},{j})");
            if j > i {
                assert_eq!(l[i * n + j], 0.0, "factor is not lower triangular");
            }
        }
    }
    let c_rlx: f64 = g
        .edges()
        .iter()
        .map(|e| e.w * (1.0 - v[e.i].iter().zip(&v[e.j]).map(|(a, b)| a * b).sum::<f64>()) / 2.0)
        .sum();
    let lower: Vec<f64> = (0..n).flat_map(|i| (0..=i).map(move |j| l[i * n + j])).collect();
    let frac = |f: &dyn Fn(f64) -> bool| lower.iter().filter(|&&x| f(x)).count() as f64 / lower.len() as f64;
    let k = est.costs.len() as f64;
    let mean = est.costs.iter().sum::<f64>() / k;
    let var = est.costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / k;
    out.push(c_rlx / m);
    out.push(frac(&|x| x > 0.0));
    out.push(frac(&|x| x.abs() < 0.1));
    out.push(frac(&|x| x.abs() < 0.001));
    out.push(mean / c_rlx);
    out.push(var.sqrt() / c_rlx);
    out
}

pub trait NaiveLaplacian {
    fn laplacian_matrix_naive(&self) -> Vec<f64>;
}

impl NaiveLaplacian for Graph {
    /// `D - A` built from the edge list.
    fn laplacian_matrix_naive(&self) -> Vec<f64> {
        let n = self.n();
        let mut l = vec![0.0; n * n];
        for e in self.edges() {
            l[e.i * n + e.i] += e.w;
            l[e.j * n + e.j] += e.w;
            l[e.i * n + e.j] -= e.w;
            l[e.j * n + e.i] -= e.w;
        }
        l
    }
}

/// Two well separated classes in `dims` non-negative columns: class 1 rows
/// concentrate their mass on the first half of the columns, class 0 on the
/// second half.
pub fn separable_rows(per_class: usize, dims: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    use rand::SeedableRng;
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..2 * per_class {
        let label = i % 2;
        let row: Vec<f64> = (0..dims)
            .map(|d| {
                let high = (d < dims.div_ceil(2)) == (label == 1);
                let base = if high { 0.8 } else { 0.1 };
                base + r.random_range(0.0..0.1)
            })
            .collect();
        x.push(row);
        y.push(label);
    }
    (x, y)
}
