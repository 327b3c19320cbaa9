//! Multi-start iterated local search.
//!
//! Each restart draws a random partition, then alternates a steepest-ascent
//! descent over four neighborhoods (relocate, swap, merge, split) with random
//! relocation kicks. The weak condition enters the objective as a penalty and
//! only weak-feasible partitions are ever reported.

use std::time::Instant;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::Graph;
use crate::partition::Partition;

use super::state::{Change, Counts, Delta, SearchState};
use super::{SolveError, SolveResult, SolverConfig, Status};

/// Best weak-feasible partition found with its exact `D`, plus the number
/// of moves and kicks applied.
pub(crate) struct Outcome {
    pub best: Option<(Partition, Delta)>,
    pub counter: u64,
}

struct Walker {
    lo: usize,
    hi: usize,
    rho: Delta,
    counter: u64,
    best: Option<(Partition, Delta)>,
}

fn density_of(state: &SearchState<'_>) -> Delta {
    (0..state.m()).fold(Delta::zero(), |acc, c| acc + state.counts(c).density())
}

impl Walker {
    fn objective(&self, state: &SearchState<'_>) -> Delta {
        density_of(state) - self.rho * Delta::from_integer(state.violation() as i128)
    }

    fn gain(&self, change: Change) -> Delta {
        change.objective(self.rho)
    }

    fn record(&mut self, state: &SearchState<'_>) {
        if !state.is_weak_feasible() {
            return;
        }
        let d = density_of(state);
        if self.best.as_ref().is_none_or(|(_, b)| d > *b) {
            self.best = Some((state.partition(), d));
        }
    }

    /// Applies moves until no neighborhood improves the objective.
    fn descend(&mut self, state: &mut SearchState<'_>) {
        loop {
            let improved = self.relocate(state) || self.swap(state) || self.merge(state) || self.split(state);
            if !improved {
                return;
            }
            self.counter += 1;
        }
    }

    fn relocate(&self, state: &mut SearchState<'_>) -> bool {
        let m = state.m();
        let links = state.link_matrix();
        let mut best: Option<(Delta, usize, usize)> = None;
        for v in 0..state.graph().n() {
            let a = state.community_of(v);
            if state.counts(a).size == 1 && m <= self.lo {
                continue;
            }
            for b in (0..m).filter(|&b| b != a) {
                let change = state.relocate_change_with(v, a, b, links[v * m + a], links[v * m + b]);
                let gain = self.gain(change);
                if gain > Delta::zero() && best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                    best = Some((gain, v, b));
                }
            }
        }
        match best {
            Some((_, v, b)) => {
                state.relocate(v, b).expect("move was validated");
                true
            }
            None => false,
        }
    }

    fn swap(&self, state: &mut SearchState<'_>) -> bool {
        let m = state.m();
        let n = state.graph().n();
        let links = state.link_matrix();
        let mut best: Option<(Delta, usize, usize)> = None;
        for u in 0..n {
            let a = state.community_of(u);
            for v in u + 1..n {
                let b = state.community_of(v);
                if a == b {
                    continue;
                }
                let (na, nb) = state.swap_counts(
                    u,
                    v,
                    (links[u * m + a], links[u * m + b]),
                    (links[v * m + a], links[v * m + b]),
                );
                let change = state.change(&[state.counts(a), state.counts(b)], &[na, nb]);
                let gain = self.gain(change);
                if gain > Delta::zero() && best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                    best = Some((gain, u, v));
                }
            }
        }
        match best {
            Some((_, u, v)) => {
                state.swap(u, v);
                true
            }
            None => false,
        }
    }

    fn merge(&self, state: &mut SearchState<'_>) -> bool {
        let m = state.m();
        if m <= self.lo {
            return false;
        }
        let mut between = vec![0i64; m * m];
        for &(u, v) in state.graph().edges() {
            let (a, b) = (state.community_of(u), state.community_of(v));
            if a != b {
                between[a.min(b) * m + a.max(b)] += 1;
            }
        }
        let mut best: Option<(Delta, usize, usize)> = None;
        for a in 0..m {
            for b in a + 1..m {
                let merged = state.merge_counts(a, b, between[a * m + b]);
                let change = state.change(&[state.counts(a), state.counts(b)], &[merged]);
                let gain = self.gain(change);
                if gain > Delta::zero() && best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                    best = Some((gain, a, b));
                }
            }
        }
        match best {
            Some((_, a, b)) => {
                state.merge(a, b);
                true
            }
            None => false,
        }
    }

    /// Greedy bisection of every community: starting from the whole
    /// community, repeatedly move to the new side the vertex with the most
    /// links there relative to links left behind, scoring every prefix.
    fn split(&self, state: &mut SearchState<'_>) -> bool {
        let m = state.m();
        if m >= self.hi {
            return false;
        }
        let g = state.graph();
        let links = state.link_matrix();
        let mut on_new_side = vec![false; g.n()];
        let mut best: Option<(Delta, usize, Vec<usize>)> = None;
        for c in 0..m {
            let mut members = state.members(c).to_vec();
            if members.len() < 2 {
                continue;
            }
            members.sort_unstable();
            let whole = state.counts(c);
            let mut stay = whole;
            let mut leave = Counts::default();
            let mut to_stay: Vec<i64> = members.iter().map(|&v| links[v * m + c]).collect();
            let mut to_leave = vec![0i64; members.len()];
            let mut moved = Vec::new();
            let mut best_prefix: Option<(Delta, usize)> = None;
            for _ in 1..members.len() {
                let pick = (0..members.len())
                    .filter(|&i| !on_new_side[members[i]])
                    .max_by_key(|&i| (to_leave[i] - to_stay[i], std::cmp::Reverse(members[i])))
                    .expect("at least two vertices remain");
                let v = members[pick];
                let k = g.degree(v) as i64;
                stay.size -= 1;
                stay.internal -= to_stay[pick];
                stay.degree_sum -= k;
                leave.size += 1;
                leave.internal += to_leave[pick];
                leave.degree_sum += k;
                on_new_side[v] = true;
                moved.push(v);
                for (i, &w) in members.iter().enumerate() {
                    if g.has_edge(v, w) {
                        to_stay[i] -= 1;
                        to_leave[i] += 1;
                    }
                }
                let gain = self.gain(state.change(&[whole], &[stay, leave]));
                if gain > Delta::zero() && best_prefix.as_ref().is_none_or(|(b, _)| gain > *b) {
                    best_prefix = Some((gain, moved.len()));
                }
            }
            for &v in &moved {
                on_new_side[v] = false;
            }
            if let Some((gain, len)) = best_prefix {
                if best.as_ref().is_none_or(|(b, _, _)| gain > *b) {
                    best = Some((gain, c, moved[..len].to_vec()));
                }
            }
        }
        match best {
            Some((_, c, part)) => {
                state.split(c, &part);
                true
            }
            None => false,
        }
    }

    /// Random relocations, possibly into a fresh community, respecting the
    /// community-count range.
    fn kick(&mut self, state: &mut SearchState<'_>, rng: &mut ChaCha8Rng) {
        let n = state.graph().n();
        let kicks = (n / 10).max(2);
        for _ in 0..kicks {
            let v = rng.gen_range(0..n);
            let a = state.community_of(v);
            let m = state.m();
            let alone = state.counts(a).size == 1;
            let can_open = !alone && m < self.hi;
            let mut targets: Vec<Option<usize>> = if alone && m <= self.lo {
                Vec::new()
            } else {
                (0..m).filter(|&b| b != a).map(Some).collect()
            };
            if can_open {
                targets.push(None);
            }
            let Some(&target) = targets.choose(rng) else {
                continue;
            };
            match target {
                Some(b) => state.relocate(v, b).expect("move was validated"),
                None => state.split(a, &[v]),
            }
            self.counter += 1;
        }
    }
}

fn random_partition(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Partition {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut labels = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        labels[v] = if i < m { i } else { rng.gen_range(0..m) };
    }
    Partition::from_labels(&labels).expect("n > 0")
}

fn restart(g: &Graph, cfg: &SolverConfig, lo: usize, hi: usize, index: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
    let m = rng.gen_range(lo..=hi);
    let mut walker = Walker {
        lo,
        hi,
        rho: cfg.rho(g.n()),
        counter: 0,
        best: None,
    };
    let mut current = SearchState::new(g, &random_partition(g.n(), m, &mut rng), lo, cfg.weak);
    walker.descend(&mut current);
    walker.record(&current);
    let mut current_value = walker.objective(&current);
    let mut best_value = current_value;
    let mut stale = 0;
    while stale < cfg.max_stale_iterations {
        let mut trial = current.clone();
        walker.kick(&mut trial, &mut rng);
        walker.descend(&mut trial);
        walker.record(&trial);
        let value = walker.objective(&trial);
        if value > best_value {
            best_value = value;
            stale = 0;
        } else {
            stale += 1;
        }
        if value >= current_value {
            current = trial;
            current_value = value;
        }
    }
    Outcome {
        best: walker.best,
        counter: walker.counter,
    }
}

/// Runs every restart and keeps the best result, preferring the earliest
/// restart on ties so the answer does not depend on scheduling.
pub(crate) fn search(g: &Graph, cfg: &SolverConfig, lo: usize, hi: usize) -> Outcome {
    let run = || -> Vec<Outcome> {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|i| restart(g, cfg, lo, hi, i))
            .collect()
    };
    let outcomes = match cfg.threads.map(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build()) {
        Some(Ok(pool)) => pool.install(run),
        _ => run(),
    };
    let mut total = Outcome {
        best: None,
        counter: 0,
    };
    for outcome in outcomes {
        total.counter += outcome.counter;
        if let Some((p, d)) = outcome.best {
            if total.best.as_ref().is_none_or(|(_, b)| d > *b) {
                total.best = Some((p, d));
            }
        }
    }
    total
}

/// Heuristic maximization over the configured community-count range.
pub fn solve_local_search(g: &Graph, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let (lo, hi) = cfg.resolve_range(g.n())?;
    let outcome = search(g, cfg, lo, hi);
    let (best, _) = outcome.best.ok_or(SolveError::Infeasible)?;
    Ok(SolveResult::new(
        g,
        cfg,
        best,
        Status::Heuristic,
        outcome.counter,
        start.elapsed(),
    ))
}
