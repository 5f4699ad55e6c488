//! QAOA for MaxCut on a dense statevector, plus the angle-search protocol.

mod depth_fit;
mod nelder_mead;
mod search;
mod simulator;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use depth_fit::{fit_log_depth, LogFit};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use search::{
    optimize_dataset_angles, optimize_depth_schedule, random_angles, AngleSearchOptions, QaoaInstance,
    GAMMA_RANGE, BETA_RANGE,
};
pub use simulator::{
    apply_qaoa_circuit, expected_cost, sample_cut_distribution, CostTable, QaoaSimulator, SampleStats,
    Statevector, MAX_QUBITS,
};

/// The `2p` circuit angles. Values are kept as given, without reduction
/// to a periodic cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaAngles {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaAngles {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::validation(format!(
                "need equal, non-zero numbers of gammas and betas (got {} and {})",
                gammas.len(),
                betas.len()
            )));
        }
        if gammas.iter().chain(&betas).any(|a| !a.is_finite()) {
            return Err(Error::validation("angles must be finite"));
        }
        Ok(QaoaAngles { gammas, betas })
    }

    pub fn zeros(p: usize) -> Result<Self> {
        QaoaAngles::new(vec![0.0; p], vec![0.0; p])
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Flat parameter vector `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn to_params(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_params(params: &[f64]) -> Result<Self> {
        if !params.len().is_multiple_of(2) {
            return Err(Error::validation("parameter vector length must be even"));
        }
        let p = params.len() / 2;
        QaoaAngles::new(params[..p].to_vec(), params[p..].to_vec())
    }

    /// Appends zero layers up to depth `p`. The extra layers act as the
    /// identity, so the circuit output is unchanged.
    pub fn zero_padded(&self, p: usize) -> Self {
        let mut out = self.clone();
        out.gammas.resize(p.max(self.p()), 0.0);
        out.betas.resize(p.max(self.p()), 0.0);
        out
    }
}

/// Outcome of optimising the angles of one instance at one depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaRun {
    pub angles: QaoaAngles,
    /// Expected cut value `F_p` at `angles`.
    pub f_p: f64,
    /// `F_p / C_max`.
    pub ratio: f64,
    /// Standard deviation of `C(z) / C_max` over sampled bitstrings.
    pub sample_std: Option<f64>,
    /// Objective calls spent on this instance at this depth.
    pub evaluations: usize,
    pub seed: u64,
    /// True when the best start stopped on its evaluation budget rather
    /// than on the simplex tolerance.
    pub budget_exhausted: bool,
}

impl QaoaRun {
    pub fn p(&self) -> usize {
        self.angles.p()
    }
}
