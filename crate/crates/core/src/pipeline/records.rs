//! Row types of the dataset files and their CSV forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::io::{fmt_f64, fmt_opt, join_f64, split_f64, Table};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES};
use crate::graph::Graph;
use crate::gw::GwEstimate;
use crate::qaoa::{QaoaAngles, QaoaRun};
use crate::selector::{label_criterion1, label_criterion2, LabeledDataset, LabeledRow};

/// One generated graph with its exact optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: usize,
    pub n: usize,
    pub seed: u64,
    pub c_max: f64,
    pub optimal_cut: Vec<i8>,
    pub graph: Graph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwRecord {
    pub instance_id: usize,
    pub n: usize,
    pub c_max: f64,
    pub c_rlx: f64,
    pub expected_cost: f64,
    pub std_cost: f64,
    pub best_cost: f64,
    pub m: usize,
    pub rng_seed: u64,
    pub sdp_converged: bool,
    pub sdp_sweeps: usize,
    pub jitter: f64,
}

impl GwRecord {
    pub fn new(instance_id: usize, n: usize, c_max: f64, est: &GwEstimate) -> Self {
        GwRecord {
            instance_id,
            n,
            c_max,
            c_rlx: est.sdp.relaxed_cost,
            expected_cost: est.stats.expected_cost,
            std_cost: est.stats.std_cost,
            best_cost: est.stats.best_cost,
            m: est.stats.m,
            rng_seed: est.stats.rng_seed,
            sdp_converged: est.sdp.converged,
            sdp_sweeps: est.sdp.sweeps,
            jitter: est.sdp.jitter,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.expected_cost / self.c_max
    }

    /// Projection spread relative to the optimum, comparable to QAOA's `sample_std`.
    pub fn std_ratio(&self) -> f64 {
        self.std_cost / self.c_max
    }
}

const GW_HEADER: [&str; 13] = [
    "instance_id",
    "n",
    "c_max",
    "c_rlx",
    "expected_cost",
    "std_cost",
    "best_cost",
    "gw_ratio",
    "m",
    "rng_seed",
    "sdp_converged",
    "sdp_sweeps",
    "jitter",
];

pub fn gw_table(records: &[GwRecord]) -> Table {
    let mut t = Table::new(&GW_HEADER);
    for r in records {
        t.push(vec![
            r.instance_id.to_string(),
            r.n.to_string(),
            fmt_f64(r.c_max),
            fmt_f64(r.c_rlx),
            fmt_f64(r.expected_cost),
            fmt_f64(r.std_cost),
            fmt_f64(r.best_cost),
            fmt_f64(r.ratio()),
            r.m.to_string(),
            r.rng_seed.to_string(),
            r.sdp_converged.to_string(),
            r.sdp_sweeps.to_string(),
            fmt_f64(r.jitter),
        ]);
    }
    t
}

pub fn parse_gw_table(t: &Table) -> Result<Vec<GwRecord>> {
    let c: Vec<usize> = GW_HEADER.iter().map(|h| t.column(h)).collect::<Result<_>>()?;
    (0..t.rows.len())
        .map(|i| {
            let cell = |k: usize| &t.rows[i][c[k]];
            Ok(GwRecord {
                instance_id: t.usize_at(i, c[0])?,
                n: t.usize_at(i, c[1])?,
                c_max: t.f64_at(i, c[2])?,
                c_rlx: t.f64_at(i, c[3])?,
                expected_cost: t.f64_at(i, c[4])?,
                std_cost: t.f64_at(i, c[5])?,
                best_cost: t.f64_at(i, c[6])?,
                m: t.usize_at(i, c[8])?,
                rng_seed: cell(9).parse().map_err(|_| Error::validation("bad rng_seed"))?,
                sdp_converged: cell(10) == "true",
                sdp_sweeps: t.usize_at(i, c[11])?,
                jitter: t.f64_at(i, c[12])?,
            })
        })
        .collect()
}

pub fn features_table(rows: &[(usize, FeatureVector)]) -> Table {
    let mut header = vec!["instance_id"];
    header.extend(FEATURE_NAMES);
    let mut t = Table::new(&header);
    for (id, f) in rows {
        let mut row = vec![id.to_string()];
        row.extend(f.values().iter().map(|v| fmt_f64(*v)));
        t.push(row);
    }
    t
}

/// Feature rows keyed by instance id; `instance_id` is optional (row index is used instead).
pub fn parse_features_table(t: &Table) -> Result<Vec<(usize, FeatureVector)>> {
    let id_col = t.column("instance_id").ok();
    let cols: Vec<usize> = FEATURE_NAMES.iter().map(|h| t.column(h)).collect::<Result<_>>()?;
    (0..t.rows.len())
        .map(|i| {
            let id = match id_col {
                Some(c) => t.usize_at(i, c)?,
                None => i,
            };
            let values: Vec<f64> = cols.iter().map(|&c| t.f64_at(i, c)).collect::<Result<_>>()?;
            Ok((id, FeatureVector::from_values(&values)?))
        })
        .collect()
}

/// QAOA results keyed by `(instance_id, p)`.
pub type RunMap = BTreeMap<(usize, usize), QaoaRun>;

const RUN_HEADER: [&str; 9] = ["instance_id", "p", "gammas", "betas", "f_p", "ratio", "sample_std", "evaluations", "seed"];

/// Rows ordered by depth, then instance.
pub fn runs_table(runs: &RunMap) -> Table {
    let mut keys: Vec<_> = runs.keys().copied().collect();
    keys.sort_by_key(|&(i, p)| (p, i));
    let mut t = Table::new(&RUN_HEADER);
    for (i, p) in keys {
        let r = &runs[&(i, p)];
        t.push(vec![
            i.to_string(),
            p.to_string(),
            join_f64(r.angles.gammas()),
            join_f64(r.angles.betas()),
            fmt_f64(r.f_p),
            fmt_f64(r.ratio),
            fmt_opt(r.sample_std),
            r.evaluations.to_string(),
            r.seed.to_string(),
        ]);
    }
    t
}

pub fn parse_runs_table(t: &Table) -> Result<RunMap> {
    let c: Vec<usize> = RUN_HEADER.iter().map(|h| t.column(h)).collect::<Result<_>>()?;
    let mut out = RunMap::new();
    for i in 0..t.rows.len() {
        let row = &t.rows[i];
        let angles = QaoaAngles::new(split_f64(&row[c[2]])?, split_f64(&row[c[3]])?)?;
        let p = t.usize_at(i, c[1])?;
        if angles.p() != p {
            return Err(Error::validation(format!("runs row {i}: {} angles for p = {p}", angles.p())));
        }
        let run = QaoaRun {
            angles,
            f_p: t.f64_at(i, c[4])?,
            ratio: t.f64_at(i, c[5])?,
            sample_std: if row[c[6]].is_empty() { None } else { Some(t.f64_at(i, c[6])?) },
            evaluations: t.usize_at(i, c[7])?,
            seed: row[c[8]].parse().map_err(|_| Error::validation("bad seed"))?,
            budget_exhausted: false,
        };
        out.insert((t.usize_at(i, c[0])?, p), run);
    }
    Ok(out)
}

const LABEL_HEADER: [&str; 7] = ["instance_id", "n", "p_used", "qaoa_ratio", "gw_ratio", "label_crit1", "label_crit2"];

/// Ratios of one instance at the labelled depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelRecord {
    pub instance_id: usize,
    pub n: usize,
    pub p_used: usize,
    pub qaoa_ratio: f64,
    pub gw_ratio: f64,
}

pub fn labels_table(rows: &[LabelRecord]) -> Table {
    let mut t = Table::new(&LABEL_HEADER);
    for r in rows {
        t.push(vec![
            r.instance_id.to_string(),
            r.n.to_string(),
            r.p_used.to_string(),
            fmt_f64(r.qaoa_ratio),
            fmt_f64(r.gw_ratio),
            label_criterion1(r.qaoa_ratio, r.gw_ratio).to_string(),
            label_criterion2(r.qaoa_ratio, r.gw_ratio).to_string(),
        ]);
    }
    t
}

/// Label records at depth `p` for every instance of `gw`.
pub fn label_records(gw: &[GwRecord], runs: &RunMap, p: usize) -> Result<Vec<LabelRecord>> {
    gw.iter()
        .map(|g| {
            let r = runs
                .get(&(g.instance_id, p))
                .ok_or_else(|| Error::validation(format!("instance {} has no depth-{p} result", g.instance_id)))?;
            Ok(LabelRecord { instance_id: g.instance_id, n: g.n, p_used: p, qaoa_ratio: r.ratio, gw_ratio: g.ratio() })
        })
        .collect()
}

/// Joins labels with features by instance id and checks the stored labels.
pub fn join_dataset(labels: &Table, features: &[(usize, FeatureVector)]) -> Result<LabeledDataset> {
    let c: Vec<usize> = LABEL_HEADER.iter().map(|h| labels.column(h)).collect::<Result<_>>()?;
    let by_id: BTreeMap<usize, &FeatureVector> = features.iter().map(|(i, f)| (*i, f)).collect();
    let mut rows = Vec::with_capacity(labels.rows.len());
    for i in 0..labels.rows.len() {
        let id = labels.usize_at(i, c[0])?;
        let f = by_id
            .get(&id)
            .ok_or_else(|| Error::validation(format!("instance {id} has labels but no features")))?;
        rows.push(LabeledRow {
            instance_id: id,
            features: **f,
            label_crit1: labels.usize_at(i, c[5])?,
            label_crit2: labels.usize_at(i, c[6])?,
            qaoa_ratio: labels.f64_at(i, c[3])?,
            gw_ratio: labels.f64_at(i, c[4])?,
            n: labels.usize_at(i, c[1])?,
            p_used: labels.usize_at(i, c[2])?,
        });
    }
    let ds = LabeledDataset { rows };
    ds.check_labels()?;
    Ok(ds)
}
