use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit `std ~ slope * ln(p) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Depth at which the fitted curve reaches the reference spread, if the
    /// curve is decreasing.
    pub crossing_depth: Option<f64>,
}

impl LogFit {
    pub fn predict(&self, depth: f64) -> f64 {
        self.slope * depth.ln() + self.intercept
    }
}

/// Fits sample spreads against `ln(depth)`. `reference_std` is the spread
/// to compare against (the GW spread); the crossing is where the fit falls
/// to it.
pub fn fit_log_depth(depths: &[usize], mean_stds: &[f64], reference_std: Option<f64>) -> Result<LogFit> {
    if depths.len() != mean_stds.len() {
        return Err(Error::validation("depths and spreads differ in length"));
    }
    if depths.contains(&0) || mean_stds.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::validation("depths must be >= 1 and spreads positive"));
    }
    let xs: Vec<f64> = depths.iter().map(|&p| (p as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = mean_stds.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if depths.iter().all(|&p| p == depths[0]) || sxx == 0.0 {
        return Err(Error::numerical("log-depth fit needs at least two distinct depths"));
    }
    let sxy: f64 = xs.iter().zip(mean_stds).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let crossing_depth = match reference_std {
        Some(target) if slope < 0.0 => Some(((target - intercept) / slope).exp()),
        _ => None,
    };
    Ok(LogFit {
        slope,
        intercept,
        crossing_depth,
    })
}
