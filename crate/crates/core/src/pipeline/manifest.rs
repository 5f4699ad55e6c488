use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::sets::MAX_SET_SEARCH_N;
use crate::qaoa::AngleSearchOptions;

/// Everything that determines an experiment's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub n_min: usize,
    pub n_max: usize,
    pub instances_per_n: usize,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Strictly increasing QAOA depths; each is warm-started from the previous.
    pub depths: Vec<usize>,
    /// Offset added to every graph seed.
    #[serde(default)]
    pub seed: u64,
    /// Root of the per-instance GW seeds.
    #[serde(default)]
    pub gw_seed: u64,
    #[serde(default = "default_projections")]
    pub gw_projections: usize,
    #[serde(default)]
    pub search: AngleSearchOptions,
    /// Depth whose ratios are labelled; defaults to the deepest.
    #[serde(default)]
    pub label_depth: Option<usize>,
    /// Not part of the hash: moving a run does not change its results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_degree() -> usize {
    4
}

fn default_projections() -> usize {
    1000
}

impl ExperimentManifest {
    /// 9 small instances, depths 1..3.
    pub fn smoke() -> Self {
        ExperimentManifest {
            n_min: 8,
            n_max: 10,
            instances_per_n: 3,
            degree: 4,
            depths: vec![1, 2, 3],
            seed: 0,
            gw_seed: 0,
            gw_projections: 1000,
            search: AngleSearchOptions {
                random_starts: 3,
                random_starts_rest: 1,
                evals_per_param: 100,
                retry_limit: Some(2),
                ..AngleSearchOptions::default()
            },
            label_depth: None,
            output_dir: None,
        }
    }

    /// The full study: 20 graphs for every n in 11..=24, depths 1..=10.
    pub fn full_study() -> Self {
        ExperimentManifest {
            n_min: 11,
            n_max: 24,
            instances_per_n: 20,
            degree: 4,
            depths: (1..=10).collect(),
            seed: 0,
            gw_seed: 0,
            gw_projections: 1000,
            search: AngleSearchOptions::default(),
            label_depth: None,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ExperimentManifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&super::io::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min < 5 || self.n_max > MAX_SET_SEARCH_N || self.n_min > self.n_max {
            return Err(Error::validation(format!(
                "n range must satisfy 5 <= n_min <= n_max <= {MAX_SET_SEARCH_N}"
            )));
        }
        if self.instances_per_n == 0 || self.degree == 0 || self.gw_projections == 0 {
            return Err(Error::validation("instances_per_n, degree and gw_projections must be positive"));
        }
        if self.depths.is_empty() || self.depths[0] == 0 || self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("depths must be a non-empty, strictly increasing list of positive integers"));
        }
        if let Some(d) = self.label_depth {
            if !self.depths.contains(&d) {
                return Err(Error::validation(format!("label_depth {d} is not in the depth schedule")));
            }
        }
        if self.search.random_starts == 0 || self.search.evals_per_param == 0 {
            return Err(Error::validation("search needs at least one random start and a positive budget"));
        }
        Ok(())
    }

    pub fn label_depth(&self) -> usize {
        self.label_depth.unwrap_or(*self.depths.last().expect("validated"))
    }

    /// SHA-256 of the canonical JSON form, without the output directory.
    pub fn hash(&self) -> String {
        let mut m = self.clone();
        m.output_dir = None;
        let json = serde_json::to_string(&m).expect("manifest serialization is infallible");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Graph seeds for one vertex count: `i*10` and `(i+1)*11` alternately,
    /// offset by the manifest seed.
    pub fn graph_seeds(&self) -> Vec<u64> {
        (0..self.instances_per_n as u64)
            .map(|k| {
                let i = k / 2;
                let base = if k % 2 == 0 { i * 10 } else { (i + 1) * 11 };
                self.seed.wrapping_add(base)
            })
            .collect()
    }

    /// `(instance_id, n, seed)` for every planned instance, in sweep order.
    pub fn plan(&self) -> Vec<(usize, usize, u64)> {
        let seeds = self.graph_seeds();
        (self.n_min..=self.n_max)
            .flat_map(|n| seeds.iter().map(move |&s| (n, s)))
            .enumerate()
            .map(|(id, (n, s))| (id, n, s))
            .collect()
    }

    /// Overrides every seed root.
    pub fn reseed(&mut self, seed: u64) {
        self.seed = seed;
        self.gw_seed = seed;
        self.search.seed = seed;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_formula() {
        let mut m = ExperimentManifest::smoke();
        m.instances_per_n = 5;
        assert_eq!(m.graph_seeds(), vec![0, 11, 10, 22, 20]);
        m.seed = 100;
        assert_eq!(m.graph_seeds()[1], 111);
    }

    #[test]
    fn plan_covers_every_size() {
        let m = ExperimentManifest::smoke();
        let plan = m.plan();
        assert_eq!(plan.len(), 9);
        assert_eq!(plan[0], (0, 8, 0));
        assert_eq!(plan[8].1, 10);
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut m = ExperimentManifest::smoke();
        let h = m.hash();
        m.output_dir = Some("elsewhere".into());
        assert_eq!(m.hash(), h);
        m.depths.push(4);
        assert_ne!(m.hash(), h);
        assert_eq!(h.len(), 64);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = ExperimentManifest::full_study();
        let back = ExperimentManifest::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(ExperimentManifest::from_json(r#"{"n_min":8,"n_max":9,"instances_per_n":1,"depths":[2,1]}"#).is_err());
        assert!(ExperimentManifest::from_json(r#"{"n_min":8,"n_max":9,"instances_per_n":1,"depths":[1],"bogus":1}"#).is_err());
        let minimal = ExperimentManifest::from_json(r#"{"n_min":8,"n_max":9,"instances_per_n":1,"depths":[1]}"#).unwrap();
        assert_eq!((minimal.degree, minimal.gw_projections), (4, 1000));
    }
}
