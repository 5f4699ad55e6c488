//! Per-depth ratio statistics, the GW comparison row and plot data.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::{fmt_f64, fmt_opt, Table};
use super::records::{GwRecord, RunMap};
use crate::error::{Error, Result};
use crate::qaoa::{fit_log_depth, LogFit};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    /// `None` for the GW row.
    pub p: Option<usize>,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Percentage of instances where QAOA's ratio exceeds GW's (QAOA rows only).
    pub pct_qaoa_beats_gw: Option<f64>,
    /// Mean spread of the cut value over the optimum.
    pub mean_std: Option<f64>,
}

impl RatioStats {
    fn new(p: Option<usize>, ratios: &[f64], pct: Option<f64>, mean_std: Option<f64>) -> Self {
        let mut s = ratios.to_vec();
        s.sort_by(f64::total_cmp);
        RatioStats {
            p,
            count: s.len(),
            min: s[0],
            q1: stats::quantile_sorted(&s, 0.25),
            median: stats::quantile_sorted(&s, 0.5),
            q3: stats::quantile_sorted(&s, 0.75),
            max: s[s.len() - 1],
            mean: stats::mean(&s),
            pct_qaoa_beats_gw: pct,
            mean_std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub depths: Vec<RatioStats>,
    pub gw: RatioStats,
    /// Fit of QAOA mean spread against `ln p`, crossing the GW mean spread.
    pub depth_fit: Option<LogFit>,
}

impl SummaryTable {
    pub fn depth(&self, p: usize) -> Option<&RatioStats> {
        self.depths.iter().find(|d| d.p == Some(p))
    }
}

pub fn summarize(gw: &[GwRecord], runs: &RunMap, depths: &[usize]) -> Result<SummaryTable> {
    if gw.is_empty() {
        return Err(Error::validation("nothing to summarise: no instances"));
    }
    let mut out = Vec::with_capacity(depths.len());
    for &p in depths {
        let mut ratios = Vec::with_capacity(gw.len());
        let mut stds = Vec::new();
        let mut wins = 0;
        let mut missing = Vec::new();
        for g in gw {
            match runs.get(&(g.instance_id, p)) {
                Some(r) => {
                    ratios.push(r.ratio);
                    wins += usize::from(r.ratio > g.ratio());
                    stds.extend(r.sample_std);
                }
                None => missing.push(g.instance_id),
            }
        }
        if !missing.is_empty() {
            return Err(Error::validation(format!("depth {p} has no results for instances {missing:?}")));
        }
        let mean_std = (stds.len() == ratios.len()).then(|| stats::mean(&stds));
        out.push(RatioStats::new(Some(p), &ratios, Some(100.0 * wins as f64 / ratios.len() as f64), mean_std));
    }
    let gw_ratios: Vec<f64> = gw.iter().map(GwRecord::ratio).collect();
    let gw_std = stats::mean(&gw.iter().map(GwRecord::std_ratio).collect::<Vec<_>>());
    let gw_row = RatioStats::new(None, &gw_ratios, None, Some(gw_std));
    let fit_points: Vec<(usize, f64)> = out.iter().filter_map(|d| Some((d.p?, d.mean_std?))).collect();
    let depth_fit = if fit_points.len() >= 2 {
        let (ps, ss): (Vec<usize>, Vec<f64>) = fit_points.into_iter().unzip();
        match fit_log_depth(&ps, &ss, Some(gw_std)) {
            Ok(f) => Some(f),
            Err(e) => {
                log::warn!("no depth fit: {e}");
                None
            }
        }
    } else {
        None
    };
    Ok(SummaryTable { depths: out, gw: gw_row, depth_fit })
}

pub const SUMMARY_FILE: &str = "summary.csv";
pub const BOXPLOT_FILE: &str = "boxplot.csv";
pub const STDS_FILE: &str = "stds.csv";

pub fn summary_table(s: &SummaryTable) -> Table {
    let mut t = Table::new(&[
        "algorithm",
        "p",
        "count",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "mean",
        "pct_qaoa_beats_gw",
        "mean_std",
    ]);
    for (alg, r) in s.depths.iter().map(|r| ("qaoa", r)).chain([("gw", &s.gw)]) {
        t.push(vec![
            alg.to_string(),
            r.p.map(|p| p.to_string()).unwrap_or_default(),
            r.count.to_string(),
            fmt_f64(r.min),
            fmt_f64(r.q1),
            fmt_f64(r.median),
            fmt_f64(r.q3),
            fmt_f64(r.max),
            fmt_f64(r.mean),
            fmt_opt(r.pct_qaoa_beats_gw),
            fmt_opt(r.mean_std),
        ]);
    }
    t
}

/// Writes summary.csv, boxplot.csv (every ratio, long form) and stds.csv
/// (mean spread per depth, the log fit and its crossing depth).
pub fn write_summary(dir: &Path, s: &SummaryTable, gw: &[GwRecord], runs: &RunMap, hash: &str) -> Result<()> {
    let mut t = summary_table(s);
    t.manifest_hash = Some(hash.to_string());
    t.write(&dir.join(SUMMARY_FILE))?;

    let mut b = Table::new(&["instance_id", "algorithm", "p", "ratio"]);
    b.manifest_hash = Some(hash.to_string());
    for g in gw {
        b.push(vec![g.instance_id.to_string(), "gw".into(), String::new(), fmt_f64(g.ratio())]);
    }
    for d in &s.depths {
        let p = d.p.expect("QAOA rows carry a depth");
        for g in gw {
            let r = &runs[&(g.instance_id, p)];
            b.push(vec![g.instance_id.to_string(), "qaoa".into(), p.to_string(), fmt_f64(r.ratio)]);
        }
    }
    b.write(&dir.join(BOXPLOT_FILE))?;

    let mut st = Table::new(&["p", "mean_sample_std", "fitted_std", "gw_mean_std", "fit_slope", "fit_intercept", "crossing_depth"]);
    st.manifest_hash = Some(hash.to_string());
    let fit = s.depth_fit;
    for d in &s.depths {
        let p = d.p.expect("QAOA rows carry a depth");
        st.push(vec![
            p.to_string(),
            fmt_opt(d.mean_std),
            fmt_opt(fit.map(|f| f.predict(p as f64))),
            fmt_opt(s.gw.mean_std),
            fmt_opt(fit.map(|f| f.slope)),
            fmt_opt(fit.map(|f| f.intercept)),
            fmt_opt(fit.and_then(|f| f.crossing_depth)),
        ]);
    }
    st.write(&dir.join(STDS_FILE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qaoa::{QaoaAngles, QaoaRun};

    fn gw(id: usize, ratio: f64) -> GwRecord {
        GwRecord {
            instance_id: id,
            n: 8,
            c_max: 10.0,
            c_rlx: 11.0,
            expected_cost: 10.0 * ratio,
            std_cost: 0.5,
            best_cost: 10.0,
            m: 10,
            rng_seed: 0,
            sdp_converged: true,
            sdp_sweeps: 1,
            jitter: 0.0,
        }
    }

    fn run(ratio: f64) -> QaoaRun {
        QaoaRun {
            angles: QaoaAngles::zeros(1).unwrap(),
            f_p: 10.0 * ratio,
            ratio,
            sample_std: Some(0.1),
            evaluations: 1,
            seed: 0,
            budget_exhausted: false,
        }
    }

    #[test]
    fn single_instance() {
        let mut runs = RunMap::new();
        runs.insert((0, 1), run(0.8));
        let s = summarize(&[gw(0, 0.9)], &runs, &[1]).unwrap();
        let d = s.depth(1).unwrap();
        assert_eq!((d.min, d.median), (0.8, 0.8));
        assert_eq!(d.pct_qaoa_beats_gw, Some(0.0));
    }

    #[test]
    fn two_instance_median() {
        let mut runs = RunMap::new();
        runs.insert((0, 1), run(0.9));
        runs.insert((1, 1), run(1.0));
        let s = summarize(&[gw(0, 0.95), gw(1, 0.95)], &runs, &[1]).unwrap();
        assert!((s.depth(1).unwrap().median - 0.95).abs() < 1e-15);
        assert_eq!(s.depth(1).unwrap().pct_qaoa_beats_gw, Some(50.0));
        assert!((s.gw.median - 0.95).abs() < 1e-12);
    }

    #[test]
    fn missing_depth_is_an_error() {
        let mut runs = RunMap::new();
        runs.insert((0, 1), run(0.9));
        assert!(summarize(&[gw(0, 0.9)], &runs, &[1, 2]).is_err());
    }
}
