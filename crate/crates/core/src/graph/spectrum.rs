use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Off-diagonal magnitude below which the Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Laplacian and adjacency spectra, both sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub laplacian_eigenvalues: Vec<f64>,
    pub adjacency_eigenvalues: Vec<f64>,
}

impl SpectrumReport {
    /// Second smallest Laplacian eigenvalue (algebraic connectivity).
    pub fn spectral_gap(&self) -> f64 {
        let l = &self.laplacian_eigenvalues;
        l[l.len() - 2]
    }
}

pub fn spectrum(g: &Graph) -> Result<SpectrumReport> {
    let n = g.n();
    Ok(SpectrumReport {
        laplacian_eigenvalues: jacobi_eigenvalues(g.laplacian_matrix(), n)?,
        adjacency_eigenvalues: jacobi_eigenvalues(g.adjacency_matrix(), n)?,
    })
}

/// Eigenvalues of a dense symmetric row-major `n x n` matrix by cyclic
/// Jacobi rotations, sorted descending.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::validation("matrix size does not match n"));
    }
    let off_max = |a: &[f64]| {
        let mut m = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                m = m.max(a[p * n + q].abs());
            }
        }
        m
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_max(&a) < JACOBI_TOL {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J with J the (p, q) rotation.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    if !converged {
        let residual = off_max(&a);
        if residual >= JACOBI_TOL {
            return Err(Error::numerical(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (max off-diagonal {residual:e})"
            )));
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}
