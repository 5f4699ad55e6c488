//! Nelder-Mead simplex minimisation.

use crate::error::{Error, Result};

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop once `max |f_i - f_best|` over the simplex falls below this...
    pub f_tol: f64,
    /// ...and every vertex lies within this distance (max norm) of the best.
    /// Without it a simplex straddling a minimum symmetrically stops early.
    pub x_tol: f64,
    /// Initial simplex offset for a non-zero coordinate.
    pub step: f64,
    /// Initial simplex offset for a coordinate that is exactly zero.
    pub zero_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evals: 10_000,
            f_tol: 1e-8,
            x_tol: 1e-4,
            step: 0.1,
            zero_step: 0.00025,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// False when the evaluation budget ran out first.
    pub converged: bool,
}

/// Minimises `f` from `x0`. Maximise by passing the negated objective.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let d = x0.len();
    if d == 0 {
        return Err(Error::validation("Nelder-Mead needs at least one dimension"));
    }
    if opts.max_evals < d + 1 {
        return Err(Error::validation(format!(
            "evaluation budget {} cannot fill a {d}-dimensional simplex",
            opts.max_evals
        )));
    }

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for k in 0..d {
        let mut v = x0.to_vec();
        v[k] += if v[k] == 0.0 { opts.zero_step } else { opts.step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();

    let mut converged = false;
    loop {
        // Stable sort keeps ties in insertion order, so runs are reproducible.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[1..].iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; d];
        for x in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECTION);
        let fr = eval(&xr, &mut evals);
        if fr < values[0] {
            let xe = along(REFLECTION * EXPANSION);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[d] = xe;
                values[d] = fe;
            } else {
                simplex[d] = xr;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = xr;
            values[d] = fr;
            continue;
        }
        let shrink = if fr < values[d] {
            let xc = along(REFLECTION * CONTRACTION);
            let fc = eval(&xc, &mut evals);
            if fc <= fr {
                simplex[d] = xc;
                values[d] = fc;
                false
            } else {
                true
            }
        } else {
            let xcc = along(-CONTRACTION);
            let fcc = eval(&xcc, &mut evals);
            if fcc < values[d] {
                simplex[d] = xcc;
                values[d] = fcc;
                false
            } else {
                true
            }
        };
        if shrink {
            let best = simplex[0].clone();
            for k in 1..=d {
                for (x, b) in simplex[k].iter_mut().zip(&best) {
                    *x = b + SHRINK * (*x - b);
                }
                values[k] = eval(&simplex[k], &mut evals);
            }
        }
    }

    Ok(NelderMeadResult {
        x: simplex[0].clone(),
        f: values[0],
        evaluations: evals,
        converged,
    })
}
