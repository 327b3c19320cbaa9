//! Depth-first branch and bound for a fixed community count.
//!
//! A community's density is the average over its members of
//! `k_v - 2 * (neighbors of v outside the community)`. Neighbors already
//! placed elsewhere are known to be outside, which gives each vertex an
//! optimistic contribution for every community it could end up in. The
//! bound picks, per community, the subset of candidates with the largest
//! average contribution, ignoring that a vertex can join only one community.

use std::time::Instant;

use num_traits::Zero;

use crate::graph::Graph;
use crate::metrics::Weak;
use crate::partition::Partition;

use super::state::Delta;
use super::{local_search, SolveError, SolveResult, SolverConfig, Status};

const NONE: usize = usize::MAX;

/// Restarts of the local search that seeds the incumbent.
const WARM_START_RESTARTS: usize = 8;

struct Node<'g> {
    g: &'g Graph,
    m: usize,
    weak: Option<Weak>,
    assign: Vec<usize>,
    /// `links[v * m + c]`: assigned neighbors of `v` in community `c`.
    links: Vec<i64>,
    assigned_neighbors: Vec<i64>,
    size: Vec<i64>,
    internal: Vec<i64>,
    degree_sum: Vec<i64>,
    opened: usize,
    unassigned: usize,
}

impl<'g> Node<'g> {
    fn empty(g: &'g Graph, m: usize, weak: Option<Weak>) -> Self {
        let n = g.n();
        Node {
            g,
            m,
            weak,
            assign: vec![NONE; n],
            links: vec![0; n * m],
            assigned_neighbors: vec![0; n],
            size: vec![0; m],
            internal: vec![0; m],
            degree_sum: vec![0; m],
            opened: 0,
            unassigned: n,
        }
    }

    fn place(&mut self, v: usize, c: usize) {
        debug_assert_eq!(self.assign[v], NONE);
        self.assign[v] = c;
        if self.size[c] == 0 {
            self.opened += 1;
        }
        self.size[c] += 1;
        self.internal[c] += self.links[v * self.m + c];
        self.degree_sum[c] += self.g.degree(v) as i64;
        self.unassigned -= 1;
        for &u in self.g.neighbors(v) {
            self.links[u * self.m + c] += 1;
            self.assigned_neighbors[u] += 1;
        }
    }

    fn unplace(&mut self, v: usize) {
        let c = self.assign[v];
        for &u in self.g.neighbors(v) {
            self.links[u * self.m + c] -= 1;
            self.assigned_neighbors[u] -= 1;
        }
        self.assign[v] = NONE;
        self.size[c] -= 1;
        if self.size[c] == 0 {
            self.opened -= 1;
        }
        self.internal[c] -= self.links[v * self.m + c];
        self.degree_sum[c] -= self.g.degree(v) as i64;
        self.unassigned += 1;
    }

    /// Optimistic contribution of `v` to community `c`.
    fn contribution(&self, v: usize, c: usize) -> i64 {
        let outside = self.assigned_neighbors[v] - self.links[v * self.m + c];
        self.g.degree(v) as i64 - 2 * outside
    }

    /// Optimistic contribution of `v` to a community nobody occupies yet.
    fn fresh_contribution(&self, v: usize) -> i64 {
        self.g.degree(v) as i64 - 2 * self.assigned_neighbors[v]
    }

    /// Upper bound on `D` over all completions, or `None` when no completion
    /// has exactly `m` non-empty communities all meeting the weak condition.
    fn bound(&self) -> Option<Delta> {
        let unopened = self.m - self.opened;
        if unopened > self.unassigned {
            return None;
        }
        let free: Vec<usize> = (0..self.g.n()).filter(|&v| self.assign[v] == NONE).collect();
        let mut total = Delta::zero();
        let mut candidates = Vec::with_capacity(free.len());
        for c in (0..self.m).filter(|&c| self.size[c] > 0) {
            let mut sum: i64 = (0..self.g.n())
                .filter(|&v| self.assign[v] == c)
                .map(|v| self.contribution(v, c))
                .sum();
            candidates.clear();
            candidates.extend(free.iter().map(|&u| self.contribution(u, c)));
            if let Some(w) = self.weak {
                let reachable = sum + candidates.iter().filter(|&&x| x > 0).sum::<i64>();
                if !w.holds(reachable) {
                    return None;
                }
            }
            candidates.sort_unstable_by(|a, b| b.cmp(a));
            let mut count = self.size[c];
            for &x in &candidates {
                if x * count > sum {
                    sum += x;
                    count += 1;
                } else {
                    break;
                }
            }
            total += Delta::new(sum as i128, count as i128);
        }
        if unopened > 0 {
            let mut fresh: Vec<i64> = free.iter().map(|&u| self.fresh_contribution(u)).collect();
            fresh.sort_unstable_by(|a, b| b.cmp(a));
            if let Some(w) = self.weak {
                let reachable: i64 = fresh.iter().filter(|&&x| x > 0).sum();
                if !w.holds(reachable.max(fresh[0])) {
                    return None;
                }
            }
            let top: i64 = fresh[..unopened].iter().sum();
            total += Delta::from_integer(top as i128);
        }
        Some(total)
    }

    fn leaf_value(&self) -> Option<Delta> {
        if self.opened < self.m {
            return None;
        }
        let mut total = Delta::zero();
        for c in 0..self.m {
            let balance = 4 * self.internal[c] - self.degree_sum[c];
            if self.weak.is_some_and(|w| !w.holds(balance)) {
                return None;
            }
            total += Delta::new(balance as i128, self.size[c] as i128);
        }
        Some(total)
    }
}

/// Bound of the search node given by a partial assignment (`None` for
/// unplaced vertices, community labels below `m`). Returns `None` when the
/// node has no feasible completion with exactly `m` communities.
pub fn node_bound(g: &Graph, m: usize, partial: &[Option<usize>], weak: Option<Weak>) -> Option<Delta> {
    assert_eq!(partial.len(), g.n(), "partial assignment length");
    let mut node = Node::empty(g, m, weak);
    for (v, c) in partial.iter().enumerate() {
        if let Some(c) = *c {
            assert!(c < m, "community label {c} out of range");
            node.place(v, c);
        }
    }
    node.bound()
}

struct Search<'g> {
    node: Node<'g>,
    order: Vec<usize>,
    incumbent: Option<Delta>,
    best: Option<Vec<usize>>,
    expanded: u64,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize) {
        self.expanded += 1;
        if depth == self.order.len() {
            if let Some(value) = self.node.leaf_value() {
                if self.incumbent.is_none_or(|b| value > b) {
                    self.incumbent = Some(value);
                    self.best = Some(self.node.assign.clone());
                }
            }
            return;
        }
        match self.node.bound() {
            None => return,
            Some(b) if self.incumbent.is_some_and(|i| b <= i) => return,
            Some(_) => {}
        }
        let v = self.order[depth];
        // Communities open in index order, so a vertex may only start the
        // next unused one.
        let top = (self.node.opened + 1).min(self.node.m);
        for c in 0..top {
            self.node.place(v, c);
            self.descend(depth + 1);
            self.node.unplace(v);
        }
    }
}

/// Proves the best partition into exactly `m` communities (the range in
/// `cfg` must be a single value). Returns the warm-start partition when the
/// search finds nothing strictly better.
pub fn solve_branch_and_bound(g: &Graph, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let (lo, hi) = cfg.resolve_range(g.n())?;
    if lo != hi {
        return Err(SolveError::Config(
            "branch and bound needs a fixed community count".into(),
        ));
    }
    let m = lo;
    let warm_cfg = SolverConfig {
        restarts: cfg.restarts.min(WARM_START_RESTARTS),
        ..cfg.clone()
    };
    let warm = local_search::search(g, &warm_cfg, lo, hi);
    let (incumbent, best) = match warm.best {
        Some((p, value)) => (Some(value), Some(p.assign().to_vec())),
        None => (None, None),
    };
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut search = Search {
        node: Node::empty(g, m, cfg.weak),
        order,
        incumbent,
        best,
        expanded: 0,
    };
    search.descend(0);
    let labels = search.best.ok_or(SolveError::Infeasible)?;
    let best = Partition::from_labels(&labels).expect("complete assignment");
    Ok(SolveResult::new(
        g,
        cfg,
        best,
        Status::ProvedOptimal,
        search.expanded,
        start.elapsed(),
    ))
}
