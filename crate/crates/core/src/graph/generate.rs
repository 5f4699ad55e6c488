use rand::seq::SliceRandom;

use super::Graph;
use crate::error::{Error, Result};
use crate::rng;

/// Pairing attempts before [`generate_regular`] gives up.
pub const MAX_RESTARTS: usize = 10_000;

/// Random connected `degree`-regular simple graph on `n` vertices.
///
/// Uses the pairing (configuration) model: `n * degree` half-edges are
/// shuffled and matched consecutively. Any pairing that produces a loop, a
/// repeated edge or a disconnected graph is thrown away and the whole
/// pairing redrawn, so accepted graphs are uniform over connected simple
/// regular graphs. The result depends only on `(n, degree, seed)`.
pub fn generate_regular(n: usize, degree: usize, seed: u64) -> Result<Graph> {
    if n < 2 || degree == 0 {
        return Err(Error::validation(format!(
            "need n >= 2 and degree >= 1 (got n={n}, degree={degree})"
        )));
    }
    if degree >= n {
        return Err(Error::validation(format!("degree {degree} must be below n={n}")));
    }
    if (n * degree) % 2 == 1 {
        return Err(Error::validation(format!(
            "n * degree = {} is odd, no {degree}-regular graph on {n} vertices",
            n * degree
        )));
    }

    let mut rng = rng::seeded(rng::mix(seed, ((n as u64) << 32) | degree as u64));
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    let mut adjacent = vec![false; n * n];

    'attempt: for _ in 0..MAX_RESTARTS {
        points.shuffle(&mut rng);
        adjacent.iter_mut().for_each(|a| *a = false);
        let mut edges = Vec::with_capacity(points.len() / 2);
        for pair in points.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || adjacent[a * n + b] {
                continue 'attempt;
            }
            adjacent[a * n + b] = true;
            adjacent[b * n + a] = true;
            edges.push((a, b));
        }
        let g = Graph::unweighted(n, edges)?;
        if g.is_connected() {
            return Ok(g.with_seed(seed));
        }
    }
    Err(Error::search(format!(
        "no connected simple {degree}-regular graph on {n} vertices after {MAX_RESTARTS} restarts"
    )))
}
