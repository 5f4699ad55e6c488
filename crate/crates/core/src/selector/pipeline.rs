//! The two exported selection pipelines as fitted, serialisable stage lists.

use serde::{Deserialize, Serialize};

use super::estimators::{
    argmax, binarize, check_shape, encode_classes, f_classif, l2_normalize, select_percentile_mask, BernoulliNb,
    DecisionTree, GaussianNb, KNeighbors, MultinomialNb, Rows, TreeParams,
};
use crate::error::{Error, Result};
use crate::features::{feature_group, FeatureGroup, FEATURE_NAMES};

/// Version of the JSON model document.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

pub const CRIT1_KNN_K: usize = 41;
pub const CRIT1_ALPHA: f64 = 0.1;
pub const CRIT2_PERCENTILE: f64 = 95.0;
pub const CRIT2_TREE: TreeParams = TreeParams { max_depth: 2, min_samples_leaf: 13, min_samples_split: 9 };
pub const CRIT2_BINARIZE: f64 = 0.25;
pub const CRIT2_KNN_K: usize = 8;
pub const CRIT2_BERNOULLI_ALPHA: f64 = 10.0;
pub const CRIT2_ALPHA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// GW strictly beats QAOA.
    #[serde(rename = "crit1")]
    One,
    /// QAOA is near-optimal and clearly beats GW.
    #[serde(rename = "crit2")]
    Two,
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "crit1" => Ok(Criterion::One),
            "2" | "crit2" => Ok(Criterion::Two),
            _ => Err(Error::validation(format!("unknown criterion {s:?} (expected 1 or 2)"))),
        }
    }
}

/// Which pipeline to fit and on which feature columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub criterion: Criterion,
    pub features: Vec<String>,
}

impl PipelineSpec {
    /// Criterion 1 on the two projection-statistics features.
    pub fn crit1() -> Self {
        PipelineSpec {
            criterion: Criterion::One,
            features: vec!["expected_costGW_over_sdp_cost".into(), "std_costGW_over_sdp_cost".into()],
        }
    }

    /// Criterion 2 on the efficiently computable group (i) features.
    pub fn crit2() -> Self {
        PipelineSpec {
            criterion: Criterion::Two,
            features: FEATURE_NAMES
                .iter()
                .enumerate()
                .filter(|&(i, _)| feature_group(i) == FeatureGroup::Spectral)
                .map(|(_, n)| n.to_string())
                .collect(),
        }
    }

    pub fn default_for(criterion: Criterion) -> Self {
        match criterion {
            Criterion::One => Self::crit1(),
            Criterion::Two => Self::crit2(),
        }
    }

    pub fn with_features(mut self, features: Vec<String>) -> Self {
        self.features = features;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    KNeighbors(KNeighbors),
    MultinomialNb(MultinomialNb),
    BernoulliNb(BernoulliNb),
    GaussianNb(GaussianNb),
    DecisionTree(DecisionTree),
}

impl Estimator {
    pub fn classes(&self) -> &[usize] {
        match self {
            Estimator::KNeighbors(m) => &m.classes,
            Estimator::MultinomialNb(m) => &m.classes,
            Estimator::BernoulliNb(m) => &m.classes,
            Estimator::GaussianNb(m) => &m.classes,
            Estimator::DecisionTree(m) => &m.classes,
        }
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Rows> {
        match self {
            Estimator::KNeighbors(m) => m.predict_proba(x),
            Estimator::MultinomialNb(m) => m.predict_proba(x),
            Estimator::BernoulliNb(m) => m.predict_proba(x),
            Estimator::GaussianNb(m) => m.predict_proba(x),
            Estimator::DecisionTree(m) => m.predict_proba(x),
        }
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<usize>> {
        let classes = self.classes();
        Ok(self.predict_proba(x)?.iter().map(|p| classes[argmax(p)]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    /// `[l2_normalize(x), x]`.
    NormalizerUnion,
    SelectPercentile {
        percentile: f64,
        /// ANOVA F scores; infinite scores are stored as `f64::MAX`.
        scores: Vec<f64>,
        mask: Vec<bool>,
    },
    Binarizer {
        threshold: f64,
    },
    /// `[predicted class, class probabilities..., x]`.
    Stacking {
        estimator: Estimator,
    },
}

impl Stage {
    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Rows> {
        Ok(match self {
            Stage::NormalizerUnion => l2_normalize(x)
                .into_iter()
                .zip(x)
                .map(|(mut a, b)| {
                    a.extend_from_slice(b);
                    a
                })
                .collect(),
            Stage::SelectPercentile { mask, .. } => {
                check_shape(x, mask.len())?;
                x.iter()
                    .map(|r| r.iter().zip(mask).filter(|(_, &m)| m).map(|(&v, _)| v).collect())
                    .collect()
            }
            Stage::Binarizer { threshold } => binarize(x, *threshold),
            Stage::Stacking { estimator } => {
                let proba = estimator.predict_proba(x)?;
                let classes = estimator.classes();
                proba
                    .into_iter()
                    .zip(x)
                    .map(|(p, r)| {
                        let mut out = Vec::with_capacity(1 + p.len() + r.len());
                        out.push(classes[argmax(&p)] as f64);
                        out.extend_from_slice(&p);
                        out.extend_from_slice(r);
                        out
                    })
                    .collect()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    pub schema_version: u32,
    pub criterion: Criterion,
    /// Input columns, in order.
    pub feature_names: Vec<String>,
    pub classes: Vec<usize>,
    pub stages: Vec<Stage>,
    pub final_estimator: Estimator,
}

fn stacked(stages: &mut Vec<Stage>, x: Rows, estimator: Estimator) -> Result<Rows> {
    let stage = Stage::Stacking { estimator };
    let out = stage.transform(&x)?;
    stages.push(stage);
    Ok(out)
}

/// Fits the pipeline named by `spec` on `x`, whose columns are `spec.features`.
pub fn fit_pipeline(spec: &PipelineSpec, x: &[Vec<f64>], y: &[usize]) -> Result<FittedPipeline> {
    if x.len() != y.len() {
        return Err(Error::validation(format!("{} rows but {} labels", x.len(), y.len())));
    }
    check_shape(x, spec.features.len())?;
    let (classes, _) = encode_classes(y);
    if classes.len() < 2 {
        return Err(Error::validation("training data has a single class"));
    }
    let mut stages = Vec::new();
    let final_estimator = match spec.criterion {
        Criterion::One => {
            let x = Stage::NormalizerUnion.transform(x)?;
            stages.push(Stage::NormalizerUnion);
            let x = stacked(&mut stages, x.clone(), Estimator::KNeighbors(KNeighbors::fit(&x, y, CRIT1_KNN_K)?))?;
            Estimator::MultinomialNb(MultinomialNb::fit(&x, y, CRIT1_ALPHA)?)
        }
        Criterion::Two => {
            let scores = f_classif(x, y)?;
            if scores.iter().all(|&s| s == 0.0) {
                return Err(Error::validation("no informative feature: every column is constant"));
            }
            let mask = select_percentile_mask(&scores, CRIT2_PERCENTILE);
            let select = Stage::SelectPercentile {
                percentile: CRIT2_PERCENTILE,
                scores: scores.iter().map(|s| s.min(f64::MAX)).collect(),
                mask,
            };
            let x = select.transform(x)?;
            stages.push(select);
            let x = stacked(&mut stages, x.clone(), Estimator::DecisionTree(DecisionTree::fit(&x, y, CRIT2_TREE)?))?;
            let bin = Stage::Binarizer { threshold: CRIT2_BINARIZE };
            let x = bin.transform(&x)?;
            stages.push(bin);
            let x = stacked(&mut stages, x.clone(), Estimator::KNeighbors(KNeighbors::fit(&x, y, CRIT2_KNN_K)?))?;
            let x = stacked(
                &mut stages,
                x.clone(),
                Estimator::BernoulliNb(BernoulliNb::fit(&x, y, CRIT2_BERNOULLI_ALPHA, 0.0)?),
            )?;
            let x = stacked(&mut stages, x.clone(), Estimator::GaussianNb(GaussianNb::fit(&x, y)?))?;
            Estimator::MultinomialNb(MultinomialNb::fit(&x, y, CRIT2_ALPHA)?)
        }
    };
    Ok(FittedPipeline {
        schema_version: MODEL_SCHEMA_VERSION,
        criterion: spec.criterion,
        feature_names: spec.features.clone(),
        classes,
        stages,
        final_estimator,
    })
}

impl FittedPipeline {
    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Rows> {
        check_shape(x, self.feature_names.len())?;
        let mut cur = x.to_vec();
        for stage in &self.stages {
            cur = stage.transform(&cur)?;
        }
        Ok(cur)
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Rows> {
        self.final_estimator.predict_proba(&self.transform(x)?)
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<usize>> {
        self.final_estimator.predict(&self.transform(x)?)
    }

    /// Probability of class label 1 per row (0 when 1 was not a training class).
    pub fn positive_proba(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        let pos = self.classes.iter().position(|&c| c == 1);
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|p| pos.map_or(0.0, |i| p[i]))
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: FittedPipeline = serde_json::from_str(text)?;
        if model.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::validation(format!(
                "model schema version {} is not supported (expected {MODEL_SCHEMA_VERSION})",
                model.schema_version
            )));
        }
        Ok(model)
    }
}
