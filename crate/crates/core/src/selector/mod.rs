//! Labelling, the two selection pipelines, cross-validation and model
//! inspection.

pub mod estimators;
pub mod eval;
pub mod pipeline;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{feature_index, FeatureVector};

pub use estimators::Rows;
pub use eval::{
    balanced_accuracy, cross_validate, partial_dependence, permutation_importance, stratified_folds, CvReport,
    Importance, PdpGrid,
};
pub use pipeline::{fit_pipeline, Criterion, FittedPipeline, PipelineSpec, MODEL_SCHEMA_VERSION};

/// QAOA ratio above which QAOA counts as near-optimal for criterion 2.
pub const CRIT2_MIN_RATIO: f64 = 0.98;
/// Required absolute ratio advantage of QAOA over GW for criterion 2.
pub const CRIT2_MARGIN: f64 = 0.02;

/// 1 when GW strictly beats QAOA; ties go to QAOA.
pub fn label_criterion1(qaoa_ratio: f64, gw_ratio: f64) -> usize {
    usize::from(gw_ratio > qaoa_ratio)
}

/// 1 when QAOA exceeds 0.98 and beats GW by at least 0.02.
pub fn label_criterion2(qaoa_ratio: f64, gw_ratio: f64) -> usize {
    usize::from(qaoa_ratio > CRIT2_MIN_RATIO && qaoa_ratio - gw_ratio >= CRIT2_MARGIN)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub instance_id: usize,
    pub features: FeatureVector,
    pub label_crit1: usize,
    pub label_crit2: usize,
    pub qaoa_ratio: f64,
    pub gw_ratio: f64,
    pub n: usize,
    pub p_used: usize,
}

impl LabeledRow {
    pub fn new(instance_id: usize, features: FeatureVector, qaoa_ratio: f64, gw_ratio: f64, n: usize, p_used: usize) -> Self {
        LabeledRow {
            instance_id,
            features,
            label_crit1: label_criterion1(qaoa_ratio, gw_ratio),
            label_crit2: label_criterion2(qaoa_ratio, gw_ratio),
            qaoa_ratio,
            gw_ratio,
            n,
            p_used,
        }
    }

    pub fn label(&self, criterion: Criterion) -> usize {
        match criterion {
            Criterion::One => self.label_crit1,
            Criterion::Two => self.label_crit2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub rows: Vec<LabeledRow>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The named feature columns of every row.
    pub fn matrix(&self, features: &[String]) -> Result<Rows> {
        let cols: Vec<usize> = features
            .iter()
            .map(|f| feature_index(f).ok_or_else(|| Error::validation(format!("unknown feature {f:?}"))))
            .collect::<Result<_>>()?;
        Ok(self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r.features.values()[c]).collect())
            .collect())
    }

    pub fn labels(&self, criterion: Criterion) -> Vec<usize> {
        self.rows.iter().map(|r| r.label(criterion)).collect()
    }

    /// Checks every stored label against the labelling rules.
    pub fn check_labels(&self) -> Result<()> {
        for r in &self.rows {
            if r.label_crit1 != label_criterion1(r.qaoa_ratio, r.gw_ratio)
                || r.label_crit2 != label_criterion2(r.qaoa_ratio, r.gw_ratio)
            {
                return Err(Error::validation(format!("labels of instance {} disagree with its ratios", r.instance_id)));
            }
        }
        Ok(())
    }
}
