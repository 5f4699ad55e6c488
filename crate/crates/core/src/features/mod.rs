//! The twenty instance features, in three groups: (i) density and Laplacian
//! spectrum, (ii) combinatorial set numbers, (iii) statistics of the GW
//! relaxation and its projections.

pub mod sets;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{spectrum, Graph, SpectrumReport};
use crate::gw::{GwEstimate, GwStats, SdpSolution};

pub use sets::{set_numbers, SetNumbers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureGroup {
    #[serde(rename = "i")]
    Spectral,
    #[serde(rename = "ii")]
    SetNumber,
    #[serde(rename = "iii")]
    Gw,
}

/// One column of the feature schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub group: FeatureGroup,
    /// NP-hard to compute; the selector can drop these by flag.
    pub expensive: bool,
    pub normalization: String,
}

pub const NUM_FEATURES: usize = 20;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "density",
    "log_norm_laplacian_ev1",
    "log_norm_laplacian_ev2",
    "log_norm_laplacian_ev3",
    "log_norm_laplacian_ev4",
    "log_norm_laplacian_ev5",
    "log_laplacian_ev_ratio",
    "spectral_gap",
    "independence_number_over_number_edges",
    "matching_number_over_number_edges",
    "diameter_over_number_edges",
    "domination_number_over_number_nodes",
    "zero_forcing_number_over_number_nodes",
    "power_domination_over_number_edges",
    "percent_cut",
    "percent_positive_lower_part_relaxation_solution",
    "percent_close1_lower_part_relaxation_solution",
    "percent_close3_lower_part_relaxation_solution",
    "expected_costGW_over_sdp_cost",
    "std_costGW_over_sdp_cost",
];

pub fn feature_group(index: usize) -> FeatureGroup {
    match index {
        0..=7 => FeatureGroup::Spectral,
        8..=13 => FeatureGroup::SetNumber,
        _ => FeatureGroup::Gw,
    }
}

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|&f| f == name)
}

/// Names, groups, expense flags and normalisations of all twenty columns.
pub fn schema() -> Vec<FeatureSpec> {
    const NORMALIZATION: [&str; NUM_FEATURES] = [
        "2|E|/(n(n-1))",
        "ln(lambda_1/degree)",
        "ln(lambda_2/degree)",
        "ln(lambda_3/degree)",
        "ln(lambda_4/degree)",
        "ln(lambda_5/degree)",
        "ln(lambda_1/lambda_2)",
        "second smallest Laplacian eigenvalue",
        "/|E|",
        "/|E|",
        "/|E|",
        "/n",
        "/n",
        "/|E|",
        "C_rlx/|E|",
        "fraction of Cholesky lower-triangle entries (diagonal included) > 0",
        "fraction of those entries with |x| < 0.1",
        "fraction of those entries with |x| < 0.001",
        "mean projection cost/C_rlx",
        "projection cost std/C_rlx",
    ];
    FEATURE_NAMES
        .iter()
        .zip(NORMALIZATION)
        .enumerate()
        .map(|(i, (name, norm))| {
            let group = feature_group(i);
            FeatureSpec {
                name: name.to_string(),
                group,
                expensive: group == FeatureGroup::SetNumber,
                normalization: norm.to_string(),
            }
        })
        .collect()
}

/// Group (i).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFeatures {
    pub density: f64,
    pub log_norm_laplacian_ev: [f64; 5],
    pub log_laplacian_ev_ratio: f64,
    pub spectral_gap: f64,
}

/// Group (ii), normalised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetNumberFeatures {
    pub independence_number_over_number_edges: f64,
    pub matching_number_over_number_edges: f64,
    pub diameter_over_number_edges: f64,
    pub domination_number_over_number_nodes: f64,
    pub zero_forcing_number_over_number_nodes: f64,
    pub power_domination_over_number_edges: f64,
}

/// Group (iii).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwFeatures {
    pub percent_cut: f64,
    pub percent_positive: f64,
    pub percent_close1: f64,
    pub percent_close3: f64,
    pub expected_cost_over_sdp_cost: f64,
    pub std_cost_over_sdp_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: [f64; NUM_FEATURES],
}

impl FeatureVector {
    pub fn assemble(spectral: &SpectralFeatures, sets: &SetNumberFeatures, gw: &GwFeatures) -> FeatureVector {
        let e = &spectral.log_norm_laplacian_ev;
        FeatureVector {
            values: [
                spectral.density,
                e[0],
                e[1],
                e[2],
                e[3],
                e[4],
                spectral.log_laplacian_ev_ratio,
                spectral.spectral_gap,
                sets.independence_number_over_number_edges,
                sets.matching_number_over_number_edges,
                sets.diameter_over_number_edges,
                sets.domination_number_over_number_nodes,
                sets.zero_forcing_number_over_number_nodes,
                sets.power_domination_over_number_edges,
                gw.percent_cut,
                gw.percent_positive,
                gw.percent_close1,
                gw.percent_close3,
                gw.expected_cost_over_sdp_cost,
                gw.std_cost_over_sdp_cost,
            ],
        }
    }

    /// Values in schema order; rejects non-finite entries.
    pub fn from_values(values: &[f64]) -> Result<FeatureVector> {
        let values: [f64; NUM_FEATURES] = values
            .try_into()
            .map_err(|_| Error::validation(format!("expected {NUM_FEATURES} feature values, got {}", values.len())))?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("feature {} is not finite", FEATURE_NAMES[i])));
        }
        Ok(FeatureVector { values })
    }

    pub fn values(&self) -> &[f64; NUM_FEATURES] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).map(|i| self.values[i])
    }
}

/// Degree used to normalise the Laplacian eigenvalues: the common degree of a
/// regular graph, else the maximum degree.
pub fn normalization_degree(g: &Graph) -> usize {
    g.regular_degree().unwrap_or_else(|| g.max_degree())
}

/// `ln(lambda_k / degree)` for the `k`-th largest Laplacian eigenvalue (1-based).
pub fn log_norm_laplacian_ev(spec: &SpectrumReport, degree: usize, k: usize) -> Result<f64> {
    let lambda = *spec
        .laplacian_eigenvalues
        .get(k - 1)
        .ok_or_else(|| Error::validation(format!("graph has fewer than {k} eigenvalues")))?;
    checked_ln(lambda / degree as f64, &format!("log_norm_laplacian_ev{k}"))
}

pub fn log_laplacian_ev_ratio(spec: &SpectrumReport) -> Result<f64> {
    let ev = &spec.laplacian_eigenvalues;
    if ev.len() < 2 {
        return Err(Error::validation("eigenvalue ratio needs n >= 2"));
    }
    checked_ln(ev[0] / ev[1], "log_laplacian_ev_ratio")
}

fn checked_ln(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(Error::validation(format!("{what}: logarithm of non-positive value {x}")))
    }
}

pub fn spectral_features(g: &Graph, spec: &SpectrumReport) -> Result<SpectralFeatures> {
    let n = g.n();
    if n < 5 {
        return Err(Error::validation("spectral features need n >= 5"));
    }
    let degree = normalization_degree(g);
    if degree == 0 {
        return Err(Error::validation("spectral features need at least one edge"));
    }
    let mut evs = [0.0; 5];
    for (k, slot) in evs.iter_mut().enumerate() {
        *slot = log_norm_laplacian_ev(spec, degree, k + 1)?;
    }
    Ok(SpectralFeatures {
        density: 2.0 * g.num_edges() as f64 / (n * (n - 1)) as f64,
        log_norm_laplacian_ev: evs,
        log_laplacian_ev_ratio: log_laplacian_ev_ratio(spec)?,
        spectral_gap: spec.spectral_gap(),
    })
}

pub fn normalize_set_numbers(g: &Graph, s: &SetNumbers) -> SetNumberFeatures {
    let m = g.num_edges() as f64;
    let n = g.n() as f64;
    SetNumberFeatures {
        independence_number_over_number_edges: s.independence as f64 / m,
        matching_number_over_number_edges: s.matching as f64 / m,
        diameter_over_number_edges: s.diameter as f64 / m,
        domination_number_over_number_nodes: s.domination as f64 / n,
        zero_forcing_number_over_number_nodes: s.zero_forcing as f64 / n,
        power_domination_over_number_edges: s.power_domination as f64 / m,
    }
}

pub fn set_number_features(g: &Graph) -> Result<SetNumberFeatures> {
    if g.num_edges() == 0 {
        return Err(Error::validation("set-number features need at least one edge"));
    }
    Ok(normalize_set_numbers(g, &set_numbers(g)?))
}

pub fn gw_features(sol: &SdpSolution, stats: &GwStats, g: &Graph) -> Result<GwFeatures> {
    if sol.n() != g.n() {
        return Err(Error::validation("SDP solution and graph disagree on n"));
    }
    if !(sol.relaxed_cost > 0.0) {
        return Err(Error::validation("relaxed cost must be positive"));
    }
    let entries = sol.cholesky_lower_entries();
    let total = entries.len() as f64;
    let fraction = |pred: &dyn Fn(f64) -> bool| entries.iter().filter(|&&x| pred(x)).count() as f64 / total;
    Ok(GwFeatures {
        percent_cut: sol.relaxed_cost / g.num_edges() as f64,
        percent_positive: fraction(&|x| x > 0.0),
        percent_close1: fraction(&|x| x.abs() < 0.1),
        percent_close3: fraction(&|x| x.abs() < 0.001),
        expected_cost_over_sdp_cost: stats.expected_cost / sol.relaxed_cost,
        std_cost_over_sdp_cost: stats.std_cost / sol.relaxed_cost,
    })
}

/// All twenty features from a graph and its GW estimate.
pub fn compute_features(g: &Graph, gw: &GwEstimate) -> Result<FeatureVector> {
    let spec = spectrum(g)?;
    let v = FeatureVector::assemble(
        &spectral_features(g, &spec)?,
        &set_number_features(g)?,
        &gw_features(&gw.sdp, &gw.stats, g)?,
    );
    FeatureVector::from_values(v.values())
}
