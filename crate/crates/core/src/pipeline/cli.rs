//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::experiment::{GW_FILE, LABELS_FILE, RUNS_FILE};
use super::io::{fmt_f64, fmt_opt, join_f64, write_atomic, Table};
use super::manifest::ExperimentManifest;
use super::records::{features_table, label_records, labels_table, parse_gw_table, parse_runs_table};
use super::{load_dataset, run_experiment, summarize_dir, SummaryTable};
use crate::error::{Error, Result};
use crate::features::compute_features;
use crate::graph::{brute_force_max, generate_regular, Graph};
use crate::gw::estimate_gw;
use crate::qaoa::{optimize_depth_schedule, AngleSearchOptions, QaoaInstance};
use crate::selector::{
    cross_validate, fit_pipeline, label_criterion1, label_criterion2, partial_dependence, permutation_importance,
    Criterion, FittedPipeline, PipelineSpec,
};

#[derive(Debug, Parser)]
#[command(name = "maxcut-select", version, about = "QAOA vs Goemans-Williamson algorithm selection for MaxCut")]
struct Cli {
    /// Seed for randomised steps (overrides every manifest seed root).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment manifest (JSON).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output file or directory; stdout when omitted for file outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Only report warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate random regular graphs (one JSON object per line).
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Exact MaxCut by exhaustive search.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Goemans-Williamson relaxation and projection statistics.
    Gw {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1000)]
        m: usize,
    },
    /// Optimise QAOA angles for one or more graphs over a depth schedule.
    Qaoa(QaoaArgs),
    /// The twenty instance features of a graph (CSV).
    Features {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1000)]
        m: usize,
    },
    /// Label a ratio pair, or recompute labels.csv of a dataset directory.
    Label {
        #[arg(long, requires = "gw_ratio", conflicts_with = "dir")]
        qaoa_ratio: Option<f64>,
        #[arg(long, requires = "qaoa_ratio")]
        gw_ratio: Option<f64>,
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Depth to label (default: deepest in runs.csv).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Recompute summary.csv, boxplot.csv and stds.csv of a dataset.
    Summarize {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated depths (default: all present).
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
    },
    /// Fit a selection pipeline on a dataset and write the model JSON.
    Train(ModelArgs),
    /// Stratified cross-validation of a selection pipeline.
    Cv {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 4)]
        folds: usize,
    },
    /// Predict labels for a features CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
    },
    /// Permutation importance of a model's inputs on a dataset.
    Importance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
    },
    /// Two-feature partial dependence grid (CSV).
    Pdp {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        feature_a: String,
        #[arg(long)]
        feature_b: String,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Run a whole experiment from --manifest into --out.
    RunAll,
}

#[derive(Debug, Args)]
struct QaoaArgs {
    #[arg(long, required = true)]
    graph: Vec<PathBuf>,
    /// Comma-separated increasing depths.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    depths: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    starts: usize,
    #[arg(long, default_value_t = 400)]
    evals_per_param: usize,
    #[arg(long)]
    retry_limit: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    shots: usize,
    /// Projections for the GW ratio that gates the second pass.
    #[arg(long, default_value_t = 1000)]
    m: usize,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    dir: PathBuf,
    /// 1 or 2.
    #[arg(long, default_value = "1")]
    criterion: Criterion,
    /// Comma-separated feature names (default: the criterion's feature set).
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<String>>,
}

impl ModelArgs {
    fn spec(&self) -> PipelineSpec {
        let spec = PipelineSpec::default_for(self.criterion);
        match &self.features {
            Some(f) => spec.with_features(f.clone()),
            None => spec,
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::from_json(&super::io::read_to_string(path)?)
}

fn read_model(path: &Path) -> Result<FittedPipeline> {
    FittedPipeline::from_json(&super::io::read_to_string(path)?)
}

fn execute(cli: &Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Generate { n, degree, count } => {
            let mut text = String::new();
            for k in 0..*count as u64 {
                text.push_str(&generate_regular(*n, *degree, seed.wrapping_add(k))?.to_json());
                text.push('\n');
            }
            emit(out, text.as_bytes())
        }
        Command::Oracle { graph } => {
            let best = brute_force_max(&read_graph(graph)?)?;
            let z: Vec<String> = best.z.iter().map(|v| v.to_string()).collect();
            emit(out, format!("c_max {}\nassignment {}\n", fmt_f64(best.cost), z.join(" ")).as_bytes())
        }
        Command::Gw { graph, m } => {
            let g = read_graph(graph)?;
            let est = estimate_gw(&g, *m, seed)?;
            let c_max = brute_force_max(&g).ok().map(|b| b.cost);
            let doc = serde_json::json!({
                "c_rlx": est.sdp.relaxed_cost,
                "expected_cost": est.stats.expected_cost,
                "std_cost": est.stats.std_cost,
                "best_cost": est.stats.best_cost,
                "m": est.stats.m,
                "rng_seed": est.stats.rng_seed,
                "sdp_converged": est.sdp.converged,
                "c_max": c_max,
                "gw_ratio": c_max.map(|c| est.stats.expected_cost / c),
            });
            emit(out, format!("{}\n", serde_json::to_string_pretty(&doc)?).as_bytes())
        }
        Command::Qaoa(a) => run_qaoa(a, seed, out),
        Command::Features { graph, m } => {
            let g = read_graph(graph)?;
            let f = compute_features(&g, &estimate_gw(&g, *m, seed)?)?;
            emit(out, &features_table(&[(0, f)]).to_bytes()?)
        }
        Command::Label { qaoa_ratio, gw_ratio, dir, depth } => match (qaoa_ratio, gw_ratio, dir) {
            (Some(q), Some(g), None) => emit(
                out,
                format!("label_crit1 {}\nlabel_crit2 {}\n", label_criterion1(*q, *g), label_criterion2(*q, *g)).as_bytes(),
            ),
            (None, None, Some(dir)) => {
                let gw_t = Table::read(&dir.join(GW_FILE))?;
                let gw = parse_gw_table(&gw_t)?;
                let runs = parse_runs_table(&Table::read(&dir.join(RUNS_FILE))?)?;
                let p = match depth {
                    Some(p) => *p,
                    None => runs.keys().map(|&(_, p)| p).max().ok_or_else(|| Error::validation("runs.csv is empty"))?,
                };
                let mut t = labels_table(&label_records(&gw, &runs, p)?);
                t.manifest_hash = gw_t.manifest_hash;
                t.write(&out.map(Path::to_path_buf).unwrap_or_else(|| dir.join(LABELS_FILE)))
            }
            _ => Err(Error::validation("give either --qaoa-ratio with --gw-ratio, or --dir")),
        },
        Command::Summarize { dir, depths } => {
            let s = summarize_dir(dir, depths.as_deref())?;
            print_summary(&s);
            Ok(())
        }
        Command::Train(m) => {
            let ds = load_dataset(&m.dir)?;
            let spec = m.spec();
            let model = fit_pipeline(&spec, &ds.matrix(&spec.features)?, &ds.labels(spec.criterion))?;
            emit(out, format!("{}\n", model.to_json()?).as_bytes())
        }
        Command::Cv { model, folds } => {
            let ds = load_dataset(&model.dir)?;
            let spec = model.spec();
            let r = cross_validate(&ds.matrix(&spec.features)?, &ds.labels(spec.criterion), &spec, *folds, seed)?;
            let mut t = Table::new(&["fold", "balanced_accuracy", "recall_class1", "confusion"]);
            for f in 0..r.k {
                let cm: Vec<String> = r.fold_confusion[f].iter().flatten().map(|c| c.to_string()).collect();
                t.push(vec![
                    f.to_string(),
                    fmt_f64(r.fold_balanced_accuracy[f]),
                    fmt_f64(r.fold_recall_class1[f]),
                    cm.join(";"),
                ]);
            }
            t.push(vec![
                "mean".into(),
                fmt_f64(r.mean_balanced_accuracy),
                fmt_f64(r.mean_recall_class1()),
                String::new(),
            ]);
            emit(out, &t.to_bytes()?)
        }
        Command::Predict { model, features } => {
            let model = read_model(model)?;
            let t = Table::read(features)?;
            let cols: Vec<usize> = model.feature_names.iter().map(|f| t.column(f)).collect::<Result<_>>()?;
            let x: Vec<Vec<f64>> = (0..t.rows.len())
                .map(|i| cols.iter().map(|&c| t.f64_at(i, c)).collect())
                .collect::<Result<_>>()?;
            let ids: Vec<String> = match t.column("instance_id") {
                Ok(c) => t.rows.iter().map(|r| r[c].clone()).collect(),
                Err(_) => (0..t.rows.len()).map(|i| i.to_string()).collect(),
            };
            let labels = model.predict(&x)?;
            let proba = model.positive_proba(&x)?;
            let mut o = Table::new(&["instance_id", "label", "probability_class1"]);
            for ((id, l), p) in ids.into_iter().zip(labels).zip(proba) {
                o.push(vec![id, l.to_string(), fmt_f64(p)]);
            }
            emit(out, &o.to_bytes()?)
        }
        Command::Importance { model, dir, repeats } => {
            let model = read_model(model)?;
            let ds = load_dataset(dir)?;
            let imp = permutation_importance(&model, &ds.matrix(&model.feature_names)?, &ds.labels(model.criterion), *repeats, seed)?;
            let mut t = Table::new(&["feature", "mean_drop", "std_drop", "drops"]);
            for i in imp {
                t.push(vec![i.feature, fmt_f64(i.mean_drop), fmt_f64(i.std_drop), join_f64(&i.drops)]);
            }
            emit(out, &t.to_bytes()?)
        }
        Command::Pdp { model, dir, feature_a, feature_b, grid } => {
            let model = read_model(model)?;
            let ds = load_dataset(dir)?;
            let g = partial_dependence(&model, &ds.matrix(&model.feature_names)?, feature_a, feature_b, *grid)?;
            let mut t = Table::new(&[feature_a, feature_b, "mean_probability_class1"]);
            for (i, a) in g.a_values.iter().enumerate() {
                for (j, b) in g.b_values.iter().enumerate() {
                    t.push(vec![fmt_f64(*a), fmt_f64(*b), fmt_f64(g.values[i][j])]);
                }
            }
            emit(out, &t.to_bytes()?)
        }
        Command::RunAll => {
            let path = cli.manifest.as_deref().ok_or_else(|| Error::validation("run-all needs --manifest"))?;
            let mut m = ExperimentManifest::load(path)?;
            if let Some(s) = cli.seed {
                m.reseed(s);
            }
            let dir = out
                .map(Path::to_path_buf)
                .or_else(|| m.output_dir.clone())
                .ok_or_else(|| Error::validation("run-all needs --out or an output_dir in the manifest"))?;
            let report = run_experiment(&m, &dir)?;
            log::info!(
                "{} instances, depths computed {:?}, skipped {:?}",
                report.instances,
                report.computed_depths,
                report.skipped_depths
            );
            print_summary(&report.summary);
            if report.failures.is_empty() {
                Ok(())
            } else {
                Err(Error::search(format!(
                    "{} instance(s) failed; see failures.csv in {}",
                    report.failures.len(),
                    dir.display()
                )))
            }
        }
    }
}

fn run_qaoa(a: &QaoaArgs, seed: u64, out: Option<&Path>) -> Result<()> {
    let instances: Vec<QaoaInstance> = a
        .graph
        .iter()
        .enumerate()
        .map(|(i, path)| {
            let graph = read_graph(path)?;
            let c_max = brute_force_max(&graph)?.cost;
            let gw = estimate_gw(&graph, a.m, crate::rng::mix(seed, i as u64))?;
            Ok(QaoaInstance { gw_ratio: gw.stats.expected_cost / c_max, graph, c_max })
        })
        .collect::<Result<_>>()?;
    let opts = AngleSearchOptions {
        random_starts: a.starts,
        random_starts_rest: a.starts,
        evals_per_param: a.evals_per_param,
        retry_limit: a.retry_limit,
        sample_shots: a.shots,
        seed,
        ..AngleSearchOptions::default()
    };
    let schedule = optimize_depth_schedule(&instances, &a.depths, &opts)?;
    let mut t = Table::new(&["instance_id", "p", "gammas", "betas", "f_p", "ratio", "gw_ratio", "sample_std", "evaluations"]);
    for (runs, p) in schedule.iter().zip(&a.depths) {
        for (i, (r, inst)) in runs.iter().zip(&instances).enumerate() {
            t.push(vec![
                i.to_string(),
                p.to_string(),
                join_f64(r.angles.gammas()),
                join_f64(r.angles.betas()),
                fmt_f64(r.f_p),
                fmt_f64(r.ratio),
                fmt_f64(inst.gw_ratio),
                fmt_opt(r.sample_std),
                r.evaluations.to_string(),
            ]);
        }
    }
    emit(out, &t.to_bytes()?)
}

fn print_summary(s: &SummaryTable) {
    println!("{:>4} {:>7} {:>8} {:>8} {:>8} {:>8}", "p", "count", "min", "median", "mean", "%>GW");
    for d in &s.depths {
        println!(
            "{:>4} {:>7} {:>8.4} {:>8.4} {:>8.4} {:>8.1}",
            d.p.unwrap_or(0),
            d.count,
            d.min,
            d.median,
            d.mean,
            d.pct_qaoa_beats_gw.unwrap_or(f64::NAN)
        );
    }
    println!("{:>4} {:>7} {:>8.4} {:>8.4} {:>8.4}", "GW", s.gw.count, s.gw.min, s.gw.median, s.gw.mean);
    if let Some(c) = s.depth_fit.and_then(|f| f.crossing_depth) {
        println!("spread fit crosses GW spread at p = {c:.2}");
    }
}
