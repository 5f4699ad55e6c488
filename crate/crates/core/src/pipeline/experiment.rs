//! End-to-end dataset generation with stage-level resumption.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::io::{Stamped, Table};
use super::manifest::ExperimentManifest;
use super::records::{
    features_table, gw_table, label_records, labels_table, parse_features_table, parse_gw_table, parse_runs_table, runs_table,
    GwRecord, InstanceRecord, RunMap,
};
use super::summary::{summarize, write_summary, SummaryTable};
use crate::error::{Error, Result};
use crate::features::{compute_features, schema, FeatureSpec, FeatureVector};
use crate::graph::{brute_force_max, generate_regular};
use crate::gw::estimate_gw;
use crate::qaoa::{optimize_dataset_angles, QaoaAngles, QaoaInstance};
use crate::rng;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const INSTANCES_FILE: &str = "instances.json";
pub const GW_FILE: &str = "gw.csv";
pub const FEATURES_FILE: &str = "features.csv";
pub const FEATURE_SCHEMA_FILE: &str = "features.schema.json";
pub const FAILURES_FILE: &str = "failures.csv";
pub const RUNS_FILE: &str = "runs.csv";
pub const LABELS_FILE: &str = "labels.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub dir: PathBuf,
    pub manifest_hash: String,
    pub instances: usize,
    /// `(instance_id, message)` for instances dropped during preparation.
    pub failures: Vec<(usize, String)>,
    pub computed_depths: Vec<usize>,
    pub skipped_depths: Vec<usize>,
    pub summary: SummaryTable,
}

struct Prepared {
    instances: Vec<InstanceRecord>,
    gw: Vec<GwRecord>,
    features: Vec<(usize, FeatureVector)>,
    failures: Vec<(usize, String)>,
}

/// Runs (or resumes) the experiment in `dir`.
///
/// Stages: instance preparation (graph, exact optimum, GW estimate,
/// features), then one QAOA stage per depth, then labels and summaries.
/// A stage whose outputs already exist for this manifest is skipped. QAOA
/// rows are committed one depth at a time, because the warm-start protocol
/// couples all instances of a depth.
pub fn run_experiment(manifest: &ExperimentManifest, dir: &Path) -> Result<ExperimentReport> {
    manifest.validate()?;
    let hash = manifest.hash();
    claim_directory(manifest, dir, &hash)?;

    let prepared = match load_prepared(dir, &hash)? {
        Some(p) => {
            log::info!("reusing {} prepared instances", p.instances.len());
            p
        }
        None => {
            let p = prepare(manifest)?;
            write_prepared(dir, &hash, &p)?;
            p
        }
    };
    if prepared.instances.is_empty() {
        return Err(Error::search("every instance failed during preparation"));
    }

    let qaoa_instances: Vec<QaoaInstance> = prepared
        .instances
        .iter()
        .zip(&prepared.gw)
        .map(|(inst, g)| QaoaInstance { graph: inst.graph.clone(), c_max: inst.c_max, gw_ratio: g.ratio() })
        .collect();
    let ids: Vec<usize> = prepared.instances.iter().map(|i| i.instance_id).collect();
    let runs_path = dir.join(RUNS_FILE);
    let mut runs = if runs_path.exists() {
        let t = Table::read(&runs_path)?;
        check_hash(&t.manifest_hash, &hash, &runs_path)?;
        parse_runs_table(&t)?
    } else {
        RunMap::new()
    };
    let (mut computed, mut skipped) = (Vec::new(), Vec::new());
    let mut previous: Option<usize> = None;
    for &p in &manifest.depths {
        if ids.iter().all(|&i| runs.contains_key(&(i, p))) {
            skipped.push(p);
            previous = Some(p);
            continue;
        }
        let warm: Option<Vec<QaoaAngles>> =
            previous.map(|q| ids.iter().map(|&i| runs[&(i, q)].angles.clone()).collect());
        let start = Instant::now();
        let depth_runs = optimize_dataset_angles(&qaoa_instances, p, warm.as_deref(), &manifest.search)?;
        log::info!("depth {p}: {} instances in {:.1}s", ids.len(), start.elapsed().as_secs_f64());
        for (&i, r) in ids.iter().zip(depth_runs) {
            runs.insert((i, p), r);
        }
        let mut t = runs_table(&runs);
        t.manifest_hash = Some(hash.clone());
        t.write(&runs_path)?;
        computed.push(p);
        previous = Some(p);
    }

    let labeled = label_records(&prepared.gw, &runs, manifest.label_depth())?;
    let mut lt = labels_table(&labeled);
    lt.manifest_hash = Some(hash.clone());
    lt.write(&dir.join(LABELS_FILE))?;

    let summary = summarize(&prepared.gw, &runs, &manifest.depths)?;
    write_summary(dir, &summary, &prepared.gw, &runs, &hash)?;
    Ok(ExperimentReport {
        dir: dir.to_path_buf(),
        manifest_hash: hash,
        instances: prepared.instances.len(),
        failures: prepared.failures,
        computed_depths: computed,
        skipped_depths: skipped,
        summary,
    })
}

fn check_hash(found: &Option<String>, expected: &str, path: &Path) -> Result<()> {
    match found {
        Some(h) if h == expected => Ok(()),
        _ => Err(Error::validation(format!(
            "{} was produced by a different manifest; use a fresh output directory",
            path.display()
        ))),
    }
}

fn claim_directory(manifest: &ExperimentManifest, dir: &Path, hash: &str) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    if path.exists() {
        let existing: Stamped<ExperimentManifest> = Stamped::read(&path)?;
        return check_hash(&Some(existing.manifest_hash), hash, &path);
    }
    let mut m = manifest.clone();
    m.output_dir = None;
    Stamped::new(hash, m).write(&path)
}

type Prepare = std::result::Result<(InstanceRecord, GwRecord, FeatureVector), String>;

fn prepare(manifest: &ExperimentManifest) -> Result<Prepared> {
    let start = Instant::now();
    let results: Vec<(usize, Prepare)> = manifest
        .plan()
        .into_par_iter()
        .map(|(id, n, seed)| {
            let one = || -> Result<(InstanceRecord, GwRecord, FeatureVector)> {
                let graph = generate_regular(n, manifest.degree, seed)?;
                let best = brute_force_max(&graph)?;
                let est = estimate_gw(&graph, manifest.gw_projections, rng::mix(manifest.gw_seed, id as u64))?;
                let features = compute_features(&graph, &est)?;
                let gw = GwRecord::new(id, n, best.cost, &est);
                Ok((InstanceRecord { instance_id: id, n, seed, c_max: best.cost, optimal_cut: best.z, graph }, gw, features))
            };
            (id, one().map_err(|e| e.to_string()))
        })
        .collect();
    let mut p = Prepared { instances: Vec::new(), gw: Vec::new(), features: Vec::new(), failures: Vec::new() };
    for (id, r) in results {
        match r {
            Ok((inst, gw, f)) => {
                p.instances.push(inst);
                p.gw.push(gw);
                p.features.push((id, f));
            }
            Err(msg) => {
                log::warn!("instance {id} dropped: {msg}");
                p.failures.push((id, msg));
            }
        }
    }
    log::info!("prepared {} instances in {:.1}s", p.instances.len(), start.elapsed().as_secs_f64());
    Ok(p)
}

fn write_prepared(dir: &Path, hash: &str, p: &Prepared) -> Result<()> {
    let mut gw = gw_table(&p.gw);
    gw.manifest_hash = Some(hash.to_string());
    gw.write(&dir.join(GW_FILE))?;
    let mut f = features_table(&p.features);
    f.manifest_hash = Some(hash.to_string());
    f.write(&dir.join(FEATURES_FILE))?;
    Stamped::new(hash, schema()).write(&dir.join(FEATURE_SCHEMA_FILE))?;
    let mut fail = Table::new(&["instance_id", "error"]);
    fail.manifest_hash = Some(hash.to_string());
    for (id, msg) in &p.failures {
        fail.push(vec![id.to_string(), msg.clone()]);
    }
    fail.write(&dir.join(FAILURES_FILE))?;
    // Written last: its presence marks the preparation stage as complete.
    Stamped::new(hash, p.instances.clone()).write(&dir.join(INSTANCES_FILE))
}

fn load_prepared(dir: &Path, hash: &str) -> Result<Option<Prepared>> {
    let inst_path = dir.join(INSTANCES_FILE);
    if !inst_path.exists() {
        return Ok(None);
    }
    let inst: Stamped<Vec<InstanceRecord>> = Stamped::read(&inst_path)?;
    check_hash(&Some(inst.manifest_hash), hash, &inst_path)?;
    let read = |name: &str| -> Result<Table> {
        let path = dir.join(name);
        let t = Table::read(&path)?;
        check_hash(&t.manifest_hash, hash, &path)?;
        Ok(t)
    };
    let gw = parse_gw_table(&read(GW_FILE)?)?;
    let features = parse_features_table(&read(FEATURES_FILE)?)?;
    let fail = read(FAILURES_FILE)?;
    let failures = (0..fail.rows.len())
        .map(|i| Ok((fail.usize_at(i, 0)?, fail.rows[i][1].clone())))
        .collect::<Result<_>>()?;
    let ids: Vec<usize> = inst.content.iter().map(|i| i.instance_id).collect();
    if gw.iter().map(|g| g.instance_id).ne(ids.iter().copied())
        || features.iter().map(|f| f.0).ne(ids.iter().copied())
    {
        return Err(Error::validation(format!("{} is inconsistent with gw.csv / features.csv", inst_path.display())));
    }
    Ok(Some(Prepared { instances: inst.content, gw, features, failures }))
}

/// Feature schema sidecar of a dataset directory.
pub fn load_feature_schema(dir: &Path) -> Result<Vec<FeatureSpec>> {
    Ok(Stamped::<Vec<FeatureSpec>>::read(&dir.join(FEATURE_SCHEMA_FILE))?.content)
}
