//! Warm-started angle search over a set of instances.
//!
//! For one depth `p`:
//!
//! 1. The first instance is optimised with Nelder-Mead from a set of random
//!    angle vectors.
//! 2. Each following instance starts from the best angles of the instance
//!    before it, plus the random vectors.
//! 3. A second pass revisits every instance whose ratio does not already
//!    beat its GW ratio and restarts Nelder-Mead from the angles found for
//!    every other instance.
//!
//! When the optimum of a smaller depth is supplied it is zero-padded and
//! added as one more start, so the optimised value never drops below the
//! smaller depth's value.

use rand::Rng as _;
use rayon::prelude::*;

use super::{nelder_mead, NelderMeadOptions, QaoaAngles, QaoaRun, QaoaSimulator};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

pub const GAMMA_RANGE: f64 = 2.0 * std::f64::consts::PI;
pub const BETA_RANGE: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AngleSearchOptions {
    /// Random starting points on the first instance.
    pub random_starts: usize,
    /// Random starting points tried on every later instance, on top of the
    /// warm start.
    pub random_starts_rest: usize,
    /// Nelder-Mead budget per start is `evals_per_param * 2p`.
    pub evals_per_param: usize,
    pub f_tol: f64,
    pub second_pass: bool,
    /// Cap on second-pass restarts per instance. The candidates are ranked by
    /// their objective value before any Nelder-Mead run; `None` retries from
    /// every other instance.
    pub retry_limit: Option<usize>,
    /// Bitstrings drawn to estimate the output spread (0 disables sampling).
    pub sample_shots: usize,
    pub seed: u64,
}

impl Default for AngleSearchOptions {
    fn default() -> Self {
        AngleSearchOptions {
            random_starts: 10,
            random_starts_rest: 10,
            evals_per_param: 400,
            f_tol: 1e-8,
            second_pass: true,
            retry_limit: None,
            sample_shots: 1000,
            seed: 0,
        }
    }
}

impl AngleSearchOptions {
    fn nm_options(&self, p: usize) -> NelderMeadOptions {
        NelderMeadOptions {
            max_evals: self.evals_per_param * 2 * p,
            f_tol: self.f_tol,
            ..NelderMeadOptions::default()
        }
    }
}

/// One instance of the study: its graph, exact optimum and GW ratio.
#[derive(Debug, Clone)]
pub struct QaoaInstance {
    pub graph: Graph,
    pub c_max: f64,
    pub gw_ratio: f64,
}

/// Uniform angles with `gamma in [0, 2 pi)` and `beta in [0, pi)`.
pub fn random_angles(p: usize, rng: &mut rng::Rng) -> QaoaAngles {
    let gammas = (0..p).map(|_| rng.random::<f64>() * GAMMA_RANGE).collect();
    let betas = (0..p).map(|_| rng.random::<f64>() * BETA_RANGE).collect();
    QaoaAngles::new(gammas, betas).expect("p >= 1")
}

#[derive(Debug, Clone)]
struct Best {
    params: Vec<f64>,
    value: f64,
    evaluations: usize,
    exhausted: bool,
}

impl Best {
    fn absorb(&mut self, other: Best) {
        self.evaluations += other.evaluations;
        if other.value > self.value {
            self.params = other.params;
            self.value = other.value;
            self.exhausted = other.exhausted;
        }
    }
}

/// Runs Nelder-Mead from every start and keeps the best; ties keep the
/// earliest start.
fn optimise_from(sim: &QaoaSimulator, starts: &[Vec<f64>], nm: &NelderMeadOptions) -> Result<Best> {
    let mut best: Option<Best> = None;
    for x0 in starts {
        let res = nelder_mead(
            |x| {
                let angles = QaoaAngles::from_params(x).expect("even parameter vector");
                -sim.expected_cost(&angles)
            },
            x0,
            nm,
        )?;
        let run = Best {
            params: res.x,
            value: -res.f,
            evaluations: res.evaluations,
            exhausted: !res.converged,
        };
        match &mut best {
            None => best = Some(run),
            Some(b) => b.absorb(run),
        }
    }
    best.ok_or_else(|| Error::validation("no starting points for angle search"))
}

fn validate(instances: &[QaoaInstance], p: usize, warm: Option<&[QaoaAngles]>) -> Result<()> {
    if p == 0 {
        return Err(Error::validation("depth must be at least 1"));
    }
    if instances.is_empty() {
        return Err(Error::validation("no instances to optimise"));
    }
    if let Some(inst) = instances.iter().find(|i| !(i.c_max > 0.0)) {
        return Err(Error::validation(format!("instance with C_max = {} has no ratio", inst.c_max)));
    }
    if let Some(w) = warm {
        if w.len() != instances.len() {
            return Err(Error::validation("warm-start angles not aligned with instances"));
        }
        if w.iter().any(|a| a.p() > p) {
            return Err(Error::validation("warm-start depth exceeds target depth"));
        }
    }
    Ok(())
}

/// Optimises the depth-`p` angles of every instance with the warm-start
/// protocol. `warm[i]`, when given, is a lower-depth optimum of instance `i`.
pub fn optimize_dataset_angles(
    instances: &[QaoaInstance],
    p: usize,
    warm: Option<&[QaoaAngles]>,
    opts: &AngleSearchOptions,
) -> Result<Vec<QaoaRun>> {
    validate(instances, p, warm)?;
    let nm = opts.nm_options(p);
    let mut seed_rng = rng::stream(rng::mix(opts.seed, p as u64), 0);
    let seeds: Vec<Vec<f64>> = (0..opts.random_starts.max(opts.random_starts_rest))
        .map(|_| random_angles(p, &mut seed_rng).to_params())
        .collect();

    let mut bests: Vec<Best> = Vec::with_capacity(instances.len());
    for (i, inst) in instances.iter().enumerate() {
        let sim = QaoaSimulator::new(&inst.graph)?;
        let mut starts: Vec<Vec<f64>> = Vec::new();
        match bests.last() {
            None => starts.extend(seeds.iter().take(opts.random_starts).cloned()),
            Some(prev) => {
                starts.push(prev.params.clone());
                starts.extend(seeds.iter().take(opts.random_starts_rest).cloned());
            }
        }
        if let Some(w) = warm {
            starts.push(w[i].zero_padded(p).to_params());
        }
        let best = optimise_from(&sim, &starts, &nm)?;
        log::debug!("p={p} instance {i}: first pass ratio {:.4}", best.value / inst.c_max);
        bests.push(best);
    }

    if opts.second_pass && instances.len() > 1 {
        let snapshot: Vec<Vec<f64>> = bests.iter().map(|b| b.params.clone()).collect();
        let retried: Vec<Option<Best>> = instances
            .par_iter()
            .enumerate()
            .map(|(i, inst)| -> Result<Option<Best>> {
                if bests[i].value / inst.c_max > inst.gw_ratio {
                    return Ok(None);
                }
                let sim = QaoaSimulator::new(&inst.graph)?;
                let mut candidates: Vec<Vec<f64>> = Vec::new();
                for (j, params) in snapshot.iter().enumerate() {
                    if j != i && !candidates.contains(params) {
                        candidates.push(params.clone());
                    }
                }
                let mut screening = 0;
                if let Some(limit) = opts.retry_limit {
                    let mut scored: Vec<(f64, Vec<f64>)> = candidates
                        .into_iter()
                        .map(|c| {
                            screening += 1;
                            (sim.expected_cost(&QaoaAngles::from_params(&c).expect("even")), c)
                        })
                        .collect();
                    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
                    candidates = scored.into_iter().take(limit).map(|(_, c)| c).collect();
                }
                if candidates.is_empty() {
                    return Ok(None);
                }
                let mut best = optimise_from(&sim, &candidates, &nm)?;
                best.evaluations += screening;
                Ok(Some(best))
            })
            .collect::<Result<_>>()?;
        for (b, r) in bests.iter_mut().zip(retried) {
            if let Some(r) = r {
                b.absorb(r);
            }
        }
    }

    instances
        .iter()
        .zip(bests)
        .enumerate()
        .map(|(i, (inst, b))| {
            let angles = QaoaAngles::from_params(&b.params)?;
            let sample_std = if opts.sample_shots > 0 {
                let sim = QaoaSimulator::new(&inst.graph)?;
                let sample_seed = rng::mix(opts.seed, ((p as u64) << 32) | i as u64);
                Some(sim.sample(&angles, opts.sample_shots, sample_seed)?.std / inst.c_max)
            } else {
                None
            };
            Ok(QaoaRun {
                angles,
                f_p: b.value,
                ratio: b.value / inst.c_max,
                sample_std,
                evaluations: b.evaluations,
                seed: opts.seed,
                budget_exhausted: b.exhausted,
            })
        })
        .collect()
}

/// Runs [`optimize_dataset_angles`] for each depth in increasing order,
/// warm-starting every depth from the zero-padded optimum of the previous
/// one. Returns one vector of runs per depth.
pub fn optimize_depth_schedule(
    instances: &[QaoaInstance],
    depths: &[usize],
    opts: &AngleSearchOptions,
) -> Result<Vec<Vec<QaoaRun>>> {
    let mut sorted = depths.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted != depths {
        return Err(Error::validation("depth schedule must be strictly increasing"));
    }
    let mut out: Vec<Vec<QaoaRun>> = Vec::with_capacity(depths.len());
    for &p in depths {
        let warm: Option<Vec<QaoaAngles>> = out.last().map(|runs| runs.iter().map(|r| r.angles.clone()).collect());
        out.push(optimize_dataset_angles(instances, p, warm.as_deref(), opts)?);
    }
    Ok(out)
}
