//! Goemans-Williamson: unit-vector SDP relaxation plus hyperplane rounding.
//!
//! The relaxation `max sum w_ij (1 - v_i . v_j) / 2` over unit vectors
//! `v_i in R^n` is solved by block-coordinate ascent: each sweep replaces
//! every `v_i` by the unit vector minimising its inner product with the
//! weighted neighbour sum, which is the exact maximiser of the objective in
//! `v_i` alone. At full rank `n` this ascent has no spurious local optima.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cut_value_unchecked, CutAssignment, Graph};
use crate::rng;
use crate::stats;

const INITIAL_JITTER: f64 = 1e-10;
const MAX_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    /// Relative objective change between sweeps that counts as converged.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Seed for the Gaussian starting vectors.
    pub seed: u64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-8,
            max_sweeps: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    /// Row `i` is the unit vector `v_i`.
    pub vectors: Vec<Vec<f64>>,
    /// `C_rlx`.
    pub relaxed_cost: f64,
    /// Row-major `X_ij = v_i . v_j`.
    pub gram: Vec<f64>,
    /// Row-major lower-triangular `L` with `L L^T = X + jitter I`.
    pub cholesky_lower: Vec<f64>,
    /// Diagonal shift that was needed to factor the Gram matrix (0 if none).
    pub jitter: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective after each sweep.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl SdpSolution {
    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    /// Entries of the Cholesky factor on and below the diagonal, row by row.
    pub fn cholesky_lower_entries(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (0..=i).map(move |j| (i, j)))
            .map(|(i, j)| self.cholesky_lower[i * n + j])
            .collect()
    }
}

fn relaxed_objective(g: &Graph, vectors: &[Vec<f64>]) -> f64 {
    g.edges()
        .iter()
        .map(|e| e.w * (1.0 - dot(&vectors[e.i], &vectors[e.j])) / 2.0)
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Solves the MaxCut relaxation of `g`.
///
/// Running out of sweeps is not an error: the best iterate is returned with
/// `converged == false`.
pub fn solve_sdp(g: &Graph, opts: &SdpOptions) -> Result<SdpSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::validation(format!("SDP tolerance must be positive, got {}", opts.tol)));
    }
    let n = g.n();
    let mut rng = rng::seeded(opts.seed);
    let mut vectors: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            while normalize(&mut v) == 0.0 {
                v = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            }
            v
        })
        .collect();

    let mut objective = relaxed_objective(g, &vectors);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    let mut field = vec![0.0; n];
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        for i in 0..n {
            field.iter_mut().for_each(|x| *x = 0.0);
            for &(j, w) in g.neighbors(i) {
                for (f, x) in field.iter_mut().zip(&vectors[j]) {
                    *f += w * x;
                }
            }
            let norm = dot(&field, &field).sqrt();
            // A vanishing neighbour field leaves v_i where it is.
            if norm > 1e-300 {
                for (v, f) in vectors[i].iter_mut().zip(&field) {
                    *v = -f / norm;
                }
            }
        }
        let next = relaxed_objective(g, &vectors);
        debug_assert!(
            next >= objective - 1e-12 * objective.abs().max(1.0),
            "coordinate ascent decreased the objective: {objective} -> {next}"
        );
        trace.push(next);
        let change = (next - objective).abs() / next.abs().max(1.0);
        objective = next;
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    let gram: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| dot(&vectors[i], &vectors[j]))
        .collect();
    let (cholesky_lower, jitter) = cholesky_with_jitter(&gram, n)?;

    Ok(SdpSolution {
        vectors,
        relaxed_cost: objective,
        gram,
        cholesky_lower,
        jitter,
        sweeps,
        converged,
        objective_trace: trace,
    })
}

/// Plain Cholesky-Banachiewicz factorisation; `None` on a non-positive pivot.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Factors `a`, adding `jitter * I` (starting at 1e-10, growing tenfold) when
/// the plain factorisation breaks down on a rank-deficient matrix.
pub fn cholesky_with_jitter(a: &[f64], n: usize) -> Result<(Vec<f64>, f64)> {
    if let Some(l) = cholesky(a, n) {
        return Ok((l, 0.0));
    }
    let mut jitter = INITIAL_JITTER;
    while jitter <= MAX_JITTER {
        let mut shifted = a.to_vec();
        for i in 0..n {
            shifted[i * n + i] += jitter;
        }
        if let Some(l) = cholesky(&shifted, n) {
            return Ok((l, jitter));
        }
        jitter *= 10.0;
    }
    Err(Error::numerical("Gram matrix is not positive semidefinite, Cholesky failed"))
}

/// Rounds with an explicit direction `r`: `z_i = sign(v_i . r)`, with
/// `sign(0) = +1`.
pub fn project_with(g: &Graph, sol: &SdpSolution, r: &[f64]) -> Result<CutAssignment> {
    if sol.n() != g.n() || r.len() != g.n() {
        return Err(Error::validation("projection dimensions do not match the graph"));
    }
    let z: Vec<i8> = sol
        .vectors
        .iter()
        .map(|v| if dot(v, r) >= 0.0 { 1 } else { -1 })
        .collect();
    let cost = cut_value_unchecked(g, &z);
    Ok(CutAssignment { z, cost })
}

/// One random hyperplane rounding with a standard Gaussian direction.
pub fn random_projection(g: &Graph, sol: &SdpSolution, rng: &mut rng::Rng) -> Result<CutAssignment> {
    let r: Vec<f64> = (0..g.n()).map(|_| rng.sample(StandardNormal)).collect();
    project_with(g, sol, &r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwStats {
    pub expected_cost: f64,
    pub std_cost: f64,
    pub best_cost: f64,
    pub m: usize,
    pub rng_seed: u64,
    /// False when the underlying SDP hit its sweep limit.
    pub sdp_converged: bool,
}

/// Solution plus projection statistics for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GwEstimate {
    pub sdp: SdpSolution,
    pub stats: GwStats,
    pub costs: Vec<f64>,
}

/// Solves the SDP once and rounds it `m` times. Projection `k` draws from
/// stream `k` of the seed, so the result is fixed by `(g, m, seed)`.
pub fn estimate_gw(g: &Graph, m: usize, seed: u64) -> Result<GwEstimate> {
    estimate_gw_with(g, m, seed, &SdpOptions::default())
}

pub fn estimate_gw_with(g: &Graph, m: usize, seed: u64, sdp_opts: &SdpOptions) -> Result<GwEstimate> {
    if m == 0 {
        return Err(Error::validation("projection count must be at least 1"));
    }
    let opts = SdpOptions {
        seed: rng::mix(seed, 0x5d9),
        ..*sdp_opts
    };
    let sdp = solve_sdp(g, &opts)?;
    if !sdp.converged {
        log::warn!("SDP did not converge in {} sweeps", sdp.sweeps);
    }
    let projection_seed = rng::mix(seed, 0x9a0);
    let costs: Vec<f64> = (0..m)
        .map(|k| {
            let mut r = rng::stream(projection_seed, k as u64);
            random_projection(g, &sdp, &mut r).map(|c| c.cost)
        })
        .collect::<Result<_>>()?;
    let stats = GwStats {
        expected_cost: stats::mean(&costs),
        std_cost: stats::std_dev(&costs),
        best_cost: costs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        m,
        rng_seed: seed,
        sdp_converged: sdp.converged,
    };
    Ok(GwEstimate { sdp, stats, costs })
}
