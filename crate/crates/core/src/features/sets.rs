//! Exact combinatorial set numbers on small graphs (bitmask representation).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph the exhaustive searches accept.
pub const MAX_SET_SEARCH_N: usize = 24;
/// Budget of closure steps shared by the subset searches of one graph.
pub const CLOSURE_STEP_BUDGET: u64 = 1_000_000_000;

const NONE: usize = usize::MAX;

/// The raw (unnormalised) set numbers of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetNumbers {
    pub independence: usize,
    pub matching: usize,
    pub diameter: usize,
    pub domination: usize,
    pub zero_forcing: usize,
    pub power_domination: usize,
}

pub fn set_numbers(g: &Graph) -> Result<SetNumbers> {
    if g.n() == 0 || g.n() > MAX_SET_SEARCH_N {
        return Err(Error::validation(format!(
            "set-number search needs 1 <= n <= {MAX_SET_SEARCH_N}, got {}",
            g.n()
        )));
    }
    let mut budget = StepBudget::new(CLOSURE_STEP_BUDGET);
    Ok(SetNumbers {
        independence: independence_number(g),
        matching: matching_number(g),
        diameter: diameter(g)?,
        domination: domination_number_with(g, &mut budget)?,
        zero_forcing: zero_forcing_number_with(g, &mut budget)?,
        power_domination: power_domination_number_with(g, &mut budget)?,
    })
}

struct StepBudget {
    left: u64,
}

impl StepBudget {
    fn new(steps: u64) -> Self {
        StepBudget { left: steps }
    }

    fn spend(&mut self, steps: u64) -> Result<()> {
        self.left = self.left.checked_sub(steps).ok_or_else(|| {
            Error::search(format!("set-number search exceeded {CLOSURE_STEP_BUDGET} closure steps"))
        })?;
        Ok(())
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn closed_masks(g: &Graph) -> Vec<u64> {
    g.adjacency_masks()
        .into_iter()
        .enumerate()
        .map(|(v, m)| m | (1 << v))
        .collect()
}

/// Size of a maximum independent set, by branch and bound.
///
/// Some maximum independent set contains a vertex of `N[v]` for any `v`, so
/// branching over the closed neighbourhood of a minimum-degree vertex is
/// exhaustive; a vertex of degree at most one can always be taken.
pub fn independence_number(g: &Graph) -> usize {
    fn search(adj: &[u64], cand: u64, size: u32, best: &mut u32) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cand.count_ones() <= *best {
            return;
        }
        let mut pick = 0;
        let mut pick_deg = u32::MAX;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (adj[v] & cand).count_ones();
            if d < pick_deg {
                pick = v;
                pick_deg = d;
            }
        }
        if pick_deg <= 1 {
            search(adj, cand & !(adj[pick] | 1 << pick), size + 1, best);
            return;
        }
        let mut branch = (adj[pick] | 1 << pick) & cand;
        while branch != 0 {
            let u = branch.trailing_zeros() as usize;
            branch &= branch - 1;
            search(adj, cand & !(adj[u] | 1 << u), size + 1, best);
        }
    }
    let adj = g.adjacency_masks();
    let mut best = 0;
    search(&adj, full_mask(g.n()), 0, &mut best);
    best as usize
}

/// Size of a maximum matching, by Edmonds' blossom algorithm.
pub fn matching_number(g: &Graph) -> usize {
    let n = g.n();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).iter().map(|&(u, _)| u).collect()).collect();
    let mut b = Blossom {
        adj: &adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
    };
    let mut size = 0;
    for root in 0..n {
        if b.mate[root] != NONE {
            continue;
        }
        if let Some(mut v) = b.find_augmenting_path(root) {
            size += 1;
            while v != NONE {
                let pv = b.parent[v];
                let next = b.mate[pv];
                b.mate[v] = pv;
                b.mate[pv] = v;
                v = next;
            }
        }
    }
    size
}

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl Blossom<'_> {
    fn lowest_common_ancestor(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_augmenting_path(&mut self, root: usize) -> Option<usize> {
        let n = self.mate.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &to in &self.adj[v] {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lowest_common_ancestor(v, to);
                    self.in_blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    queue.push_back(m);
                }
            }
        }
        None
    }
}

/// Longest shortest path; errors on a disconnected graph.
pub fn diameter(g: &Graph) -> Result<usize> {
    let mut diam = 0;
    for s in 0..g.n() {
        for d in g.bfs_distances(s) {
            let d = d.ok_or_else(|| Error::validation("diameter of a disconnected graph is infinite"))?;
            diam = diam.max(d);
        }
    }
    Ok(diam)
}

/// Closure of `filled` under the zero forcing rule: a filled vertex with
/// exactly one unfilled neighbour fills it.
pub fn zero_forcing_closure(adj: &[u64], filled: u64) -> u64 {
    zero_forcing_closure_counted(adj, filled, &mut 0)
}

fn zero_forcing_closure_counted(adj: &[u64], mut filled: u64, steps: &mut u64) -> u64 {
    loop {
        let before = filled;
        let mut rest = filled;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            *steps += 1;
            let open = adj[v] & !filled;
            if open.count_ones() == 1 {
                filled |= open;
            }
        }
        if filled == before {
            return filled;
        }
    }
}

/// Smallest `k` for which some `k`-subset passes `accept`, scanning subsets in
/// increasing cardinality from `k_min`.
fn min_subset(
    n: usize,
    k_min: usize,
    budget: &mut StepBudget,
    mut accept: impl FnMut(u64, &mut u64) -> bool,
) -> Result<usize> {
    let full = full_mask(n);
    for k in k_min..=n {
        if k == 0 {
            let mut steps = 1;
            let ok = accept(0, &mut steps);
            budget.spend(steps)?;
            if ok {
                return Ok(0);
            }
            continue;
        }
        let mut s: u64 = (1u64 << k) - 1;
        let mut steps = 0;
        loop {
            steps += 1;
            if accept(s, &mut steps) {
                budget.spend(steps)?;
                return Ok(k);
            }
            if steps > 1 << 16 {
                budget.spend(steps)?;
                steps = 0;
            }
            // Gosper's hack: next subset of the same size.
            let c = s & s.wrapping_neg();
            let r = s + c;
            if r > full || r == 0 {
                break;
            }
            s = (((r ^ s) >> 2) / c) | r;
            if s > full {
                break;
            }
        }
        budget.spend(steps)?;
    }
    Ok(n)
}

fn domination_number_with(g: &Graph, budget: &mut StepBudget) -> Result<usize> {
    let closed = closed_masks(g);
    let full = full_mask(g.n());
    min_subset(g.n(), 1, budget, |s, steps| {
        *steps += s.count_ones() as u64;
        dominated(&closed, s) == full
    })
}

fn zero_forcing_number_with(g: &Graph, budget: &mut StepBudget) -> Result<usize> {
    let adj = g.adjacency_masks();
    let full = full_mask(g.n());
    // Any zero forcing set of a graph with an edge has at least min-degree vertices.
    let k_min = (0..g.n()).map(|v| g.degree(v)).min().unwrap_or(0).max(1);
    min_subset(g.n(), k_min, budget, |s, steps| {
        zero_forcing_closure_counted(&adj, s, steps) == full
    })
}

fn power_domination_number_with(g: &Graph, budget: &mut StepBudget) -> Result<usize> {
    let adj = g.adjacency_masks();
    let closed = closed_masks(g);
    let full = full_mask(g.n());
    min_subset(g.n(), 1, budget, |s, steps| {
        zero_forcing_closure_counted(&adj, dominated(&closed, s), steps) == full
    })
}

fn dominated(closed: &[u64], s: u64) -> u64 {
    let mut out = 0;
    let mut rest = s;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= closed[v];
    }
    out
}

pub fn domination_number(g: &Graph) -> Result<usize> {
    domination_number_with(g, &mut StepBudget::new(CLOSURE_STEP_BUDGET))
}

pub fn zero_forcing_number(g: &Graph) -> Result<usize> {
    zero_forcing_number_with(g, &mut StepBudget::new(CLOSURE_STEP_BUDGET))
}

pub fn power_domination_number(g: &Graph) -> Result<usize> {
    power_domination_number_with(g, &mut StepBudget::new(CLOSURE_STEP_BUDGET))
}
