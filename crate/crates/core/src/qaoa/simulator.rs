use num_complex::Complex64;
use rand::Rng as _;

use super::QaoaAngles;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;
use crate::stats;

/// Largest register the simulator will allocate (`2^26` amplitudes).
pub const MAX_QUBITS: usize = 26;

/// Integer cut values up to this bound get a phase lookup table.
const MAX_PHASE_LEVELS: f64 = 4096.0;

/// Cut value `C(z)` of every basis state.
///
/// Basis index bit `v` set means qubit `v` is `|1>`, i.e. `z_v = -1`.
#[derive(Debug, Clone)]
pub struct CostTable {
    n: usize,
    costs: Vec<f64>,
    /// `Some(levels)` when all cut values are small integers.
    levels: Option<Vec<u16>>,
    total_weight: f64,
}

impl CostTable {
    pub fn new(g: &Graph) -> Result<Self> {
        let n = g.n();
        if n > MAX_QUBITS {
            return Err(Error::validation(format!(
                "statevector limited to {MAX_QUBITS} qubits, graph has {n}"
            )));
        }
        // costs[z | 1 << h] = costs[z] + change from flipping h, where every
        // vertex above h is still |0>.
        let mut costs = vec![0.0; 1 << n];
        for h in 0..n {
            let lower: Vec<(usize, f64)> = g.neighbors(h).iter().copied().filter(|&(u, _)| u < h).collect();
            let upper: f64 = g.neighbors(h).iter().filter(|&&(u, _)| u > h).map(|&(_, w)| w).sum();
            let base = 1usize << h;
            for z in 0..base {
                let delta: f64 = lower
                    .iter()
                    .map(|&(u, w)| if (z >> u) & 1 == 0 { w } else { -w })
                    .sum();
                costs[base | z] = costs[z] + delta + upper;
            }
        }
        let total_weight = g.total_weight();
        let levels = (g.has_integer_weights()
            && g.edges().iter().all(|e| e.w >= 0.0)
            && total_weight <= MAX_PHASE_LEVELS)
            .then(|| costs.iter().map(|&c| c as u16).collect());
        Ok(CostTable {
            n,
            costs,
            levels,
            total_weight,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn max_cost(&self) -> f64 {
        self.costs.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies amplitude `z` by `exp(-i gamma <z|H_C|z>)` with
    /// `<z|H_C|z> = W/2 - C(z)`, over the first `amps.len()` basis states.
    fn apply_phase(&self, amps: &mut [Complex64], gamma: f64) {
        let half_w = self.total_weight / 2.0;
        match &self.levels {
            Some(levels) => {
                let table: Vec<Complex64> = (0..=self.total_weight as usize)
                    .map(|c| Complex64::from_polar(1.0, -gamma * (half_w - c as f64)))
                    .collect();
                for (a, &l) in amps.iter_mut().zip(levels) {
                    *a *= table[l as usize];
                }
            }
            None => {
                for (a, &c) in amps.iter_mut().zip(&self.costs) {
                    *a *= Complex64::from_polar(1.0, -gamma * (half_w - c));
                }
            }
        }
    }
}

/// `2^n` amplitudes, bit `v` of the index encoding qubit `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|+>^n`.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let amp = Complex64::new((dim as f64).powf(-0.5), 0.0);
        Statevector {
            amplitudes: vec![amp; dim],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `exp(-i beta X)` on qubit `q`, for a register laid out with stride
/// `1 << q`.
fn apply_rx(amps: &mut [Complex64], q: usize, cos: f64, sin: f64) {
    let stride = 1usize << q;
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = Complex64::new(cos * x.re + sin * y.im, cos * x.im - sin * y.re);
            *b = Complex64::new(cos * y.re + sin * x.im, cos * y.im - sin * x.re);
        }
    }
}

#[inline]
fn rotate(ar: &mut f64, ai: &mut f64, br: &mut f64, bi: &mut f64, cos: f64, sin: f64) {
    let (xr, xi, yr, yi) = (*ar, *ai, *br, *bi);
    *ar = cos * xr + sin * yi;
    *ai = cos * xi - sin * yr;
    *br = cos * yr + sin * xi;
    *bi = cos * yi - sin * xr;
}

fn rx_split(re: &mut [f64], im: &mut [f64], q: usize, cos: f64, sin: f64) {
    let stride = 1usize << q;
    for (rb, ib) in re.chunks_exact_mut(2 * stride).zip(im.chunks_exact_mut(2 * stride)) {
        let (rlo, rhi) = rb.split_at_mut(stride);
        let (ilo, ihi) = ib.split_at_mut(stride);
        for (((ar, ai), br), bi) in rlo.iter_mut().zip(ilo.iter_mut()).zip(rhi.iter_mut()).zip(ihi.iter_mut()) {
            rotate(ar, ai, br, bi, cos, sin);
        }
    }
}

/// Mixer on the top qubit of a half register: `z` pairs with `z ^ low_mask`,
/// i.e. index `k` of the lower quarter with index `quarter - 1 - k` of the
/// upper quarter.
fn rx_top_split(re: &mut [f64], im: &mut [f64], cos: f64, sin: f64) {
    let quarter = re.len() / 2;
    let (rlo, rhi) = re.split_at_mut(quarter);
    let (ilo, ihi) = im.split_at_mut(quarter);
    for (((ar, ai), br), bi) in rlo
        .iter_mut()
        .zip(ilo.iter_mut())
        .zip(rhi.iter_mut().rev())
        .zip(ihi.iter_mut().rev())
    {
        rotate(ar, ai, br, bi, cos, sin);
    }
}

/// Builds the cost table once and reuses it for every circuit evaluation
/// on the same graph.
#[derive(Debug, Clone)]
pub struct QaoaSimulator {
    table: CostTable,
}

impl QaoaSimulator {
    pub fn new(g: &Graph) -> Result<Self> {
        Ok(QaoaSimulator {
            table: CostTable::new(g)?,
        })
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    pub fn cost_table(&self) -> &CostTable {
        &self.table
    }

    pub fn apply_cost_layer(&self, state: &mut Statevector, gamma: f64) {
        self.table.apply_phase(&mut state.amplitudes, gamma);
    }

    pub fn apply_mixer_layer(&self, state: &mut Statevector, beta: f64) {
        let (sin, cos) = beta.sin_cos();
        for q in 0..self.n() {
            apply_rx(&mut state.amplitudes, q, cos, sin);
        }
    }

    /// Full `2^n` statevector for `angles`; `on_layer(k, state)` is called
    /// after layer `k` (1-based).
    pub fn run_with(&self, angles: &QaoaAngles, mut on_layer: impl FnMut(usize, &Statevector)) -> Statevector {
        let mut state = Statevector::uniform(self.n());
        for (k, (&gamma, &beta)) in angles.gammas().iter().zip(angles.betas()).enumerate() {
            self.apply_cost_layer(&mut state, gamma);
            self.apply_mixer_layer(&mut state, beta);
            on_layer(k + 1, &state);
        }
        state
    }

    pub fn run(&self, angles: &QaoaAngles) -> Statevector {
        self.run_with(angles, |_, _| {})
    }

    pub fn expectation(&self, state: &Statevector) -> f64 {
        state
            .amplitudes
            .iter()
            .zip(&self.table.costs)
            .map(|(a, c)| a.norm_sqr() * c)
            .sum()
    }

    /// `F_p` computed on the half register.
    ///
    /// `C(z) = C(~z)` and both Hamiltonians commute with the global bit flip,
    /// so `psi(z) = psi(~z)` throughout the circuit. Only indices with the
    /// top qubit clear are stored, as separate real and imaginary arrays; the
    /// mixer on the top qubit pairs `z` with `z ^ low_mask`.
    pub fn expected_cost(&self, angles: &QaoaAngles) -> f64 {
        let n = self.n();
        let half = 1usize << (n - 1);
        let mut re = vec![((1usize << n) as f64).powf(-0.5); half];
        let mut im = vec![0.0; half];
        let mut phase_re = Vec::new();
        let mut phase_im = Vec::new();
        for (&gamma, &beta) in angles.gammas().iter().zip(angles.betas()) {
            self.phase_split(&mut re, &mut im, gamma, &mut phase_re, &mut phase_im);
            let (sin, cos) = beta.sin_cos();
            for q in 0..n - 1 {
                rx_split(&mut re, &mut im, q, cos, sin);
            }
            rx_top_split(&mut re, &mut im, cos, sin);
        }
        let costs = &self.table.costs[..half];
        let mut acc = 0.0;
        for ((r, i), c) in re.iter().zip(&im).zip(costs) {
            acc += (r * r + i * i) * c;
        }
        2.0 * acc
    }

    fn phase_split(
        &self,
        re: &mut [f64],
        im: &mut [f64],
        gamma: f64,
        table_re: &mut Vec<f64>,
        table_im: &mut Vec<f64>,
    ) {
        let half_w = self.table.total_weight / 2.0;
        match &self.table.levels {
            Some(levels) => {
                table_re.clear();
                table_im.clear();
                for c in 0..=self.table.total_weight as usize {
                    let (s, co) = (-gamma * (half_w - c as f64)).sin_cos();
                    table_re.push(co);
                    table_im.push(s);
                }
                for ((r, i), &l) in re.iter_mut().zip(im.iter_mut()).zip(levels) {
                    let (pr, pi) = (table_re[l as usize], table_im[l as usize]);
                    let (x, y) = (*r, *i);
                    *r = x * pr - y * pi;
                    *i = x * pi + y * pr;
                }
            }
            None => {
                for ((r, i), &c) in re.iter_mut().zip(im.iter_mut()).zip(&self.table.costs) {
                    let (pi, pr) = (-gamma * (half_w - c)).sin_cos();
                    let (x, y) = (*r, *i);
                    *r = x * pr - y * pi;
                    *i = x * pi + y * pr;
                }
            }
        }
    }

    /// Draws `m` basis states from the output distribution by inverse CDF.
    pub fn sample(&self, angles: &QaoaAngles, m: usize, seed: u64) -> Result<SampleStats> {
        if m == 0 {
            return Err(Error::validation("sample count must be at least 1"));
        }
        let state = self.run(angles);
        Ok(sample_state(&self.table, &state, m, seed))
    }
}

fn sample_state(table: &CostTable, state: &Statevector, m: usize, seed: u64) -> SampleStats {
    let mut cdf = Vec::with_capacity(state.amplitudes.len());
    let mut acc = 0.0;
    for a in &state.amplitudes {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = rng::seeded(seed);
    let costs: Vec<f64> = (0..m)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            table.costs[idx]
        })
        .collect();
    SampleStats {
        mean: stats::mean(&costs),
        std: stats::std_dev(&costs),
        best: costs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Mean, population standard deviation and maximum of sampled cut values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub std: f64,
    pub best: f64,
}

pub fn apply_qaoa_circuit(g: &Graph, angles: &QaoaAngles) -> Result<Statevector> {
    Ok(QaoaSimulator::new(g)?.run(angles))
}

pub fn expected_cost(g: &Graph, angles: &QaoaAngles) -> Result<f64> {
    Ok(QaoaSimulator::new(g)?.expected_cost(angles))
}

pub fn sample_cut_distribution(g: &Graph, angles: &QaoaAngles, m: usize, seed: u64) -> Result<SampleStats> {
    QaoaSimulator::new(g)?.sample(angles, m, seed)
}
