//! Mutable search state with exact incremental move evaluation.
//!
//! A community's contribution depends only on `(n_l, e_l, K_l)`, so a move
//! that touches a handful of communities is scored by recomputing just those
//! terms.

use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use thiserror::Error;

use crate::decimal::big128;
use crate::graph::Graph;
use crate::metrics::Weak;
use crate::partition::Partition;

pub type Delta = Ratio<i128>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("vertex {vertex} is in community {actual}, not {claimed}")]
    WrongSource {
        vertex: usize,
        actual: usize,
        claimed: usize,
    },
    #[error("source and target community are both {0}")]
    SameCommunity(usize),
    #[error("community {0} does not exist")]
    NoSuchCommunity(usize),
    #[error("move would empty community {0} below the minimum community count")]
    WouldEmpty(usize),
}

/// Running counts for one community.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Counts {
    pub size: i64,
    pub internal: i64,
    pub degree_sum: i64,
}

impl Counts {
    pub fn balance(&self) -> i64 {
        4 * self.internal - self.degree_sum
    }

    pub fn density(&self) -> Delta {
        Delta::new(self.balance() as i128, self.size as i128)
    }

    /// Shortfall against the weak constraint, `max(0, K + L - 4e)`.
    pub fn violation(&self, weak: Option<Weak>) -> i64 {
        weak.map_or(0, |w| (w.offset() - self.balance()).max(0))
    }
}

/// Score change of a move: density change and weak-shortfall change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Change {
    pub density: Delta,
    pub violation: i64,
}

impl Change {
    pub fn objective(&self, rho: Delta) -> Delta {
        self.density - rho * Delta::from_integer(self.violation as i128)
    }
}

#[derive(Debug, Clone)]
pub struct SearchState<'g> {
    g: &'g Graph,
    assign: Vec<usize>,
    members: Vec<Vec<usize>>,
    counts: Vec<Counts>,
    min_communities: usize,
    weak: Option<Weak>,
}

impl<'g> SearchState<'g> {
    /// `min_communities` is the smallest community count a move may leave.
    pub fn new(g: &'g Graph, p: &Partition, min_communities: usize, weak: Option<Weak>) -> Self {
        let blocks = p.blocks();
        let mut counts = vec![Counts::default(); p.m()];
        for (c, block) in blocks.iter().enumerate() {
            counts[c].size = block.len() as i64;
            counts[c].degree_sum = block.iter().map(|&v| g.degree(v) as i64).sum();
        }
        for &(u, v) in g.edges() {
            if p.community_of(u) == p.community_of(v) {
                counts[p.community_of(u)].internal += 1;
            }
        }
        SearchState {
            g,
            assign: p.assign().to_vec(),
            members: blocks,
            counts,
            min_communities,
            weak,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn m(&self) -> usize {
        self.counts.len()
    }

    pub fn community_of(&self, v: usize) -> usize {
        self.assign[v]
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn counts(&self, c: usize) -> Counts {
        self.counts[c]
    }

    pub fn weak(&self) -> Option<Weak> {
        self.weak
    }

    pub fn min_communities(&self) -> usize {
        self.min_communities
    }

    pub fn partition(&self) -> Partition {
        Partition::from_labels(&self.assign).expect("state is never empty")
    }

    pub fn modularity_density(&self) -> BigRational {
        self.counts
            .iter()
            .fold(BigRational::zero(), |acc, c| acc + big128(c.density()))
    }

    /// Total weak-constraint shortfall over all communities.
    pub fn violation(&self) -> i64 {
        self.counts.iter().map(|c| c.violation(self.weak)).sum()
    }

    pub fn is_weak_feasible(&self) -> bool {
        self.violation() == 0
    }

    /// Number of neighbors of `v` in community `c`.
    pub fn links(&self, v: usize, c: usize) -> i64 {
        self.g
            .neighbors(v)
            .iter()
            .filter(|&&u| self.assign[u] == c)
            .count() as i64
    }

    /// `links[v * m + c]` for every vertex and community.
    pub fn link_matrix(&self) -> Vec<i64> {
        let m = self.m();
        let mut out = vec![0i64; self.g.n() * m];
        for &(u, v) in self.g.edges() {
            out[u * m + self.assign[v]] += 1;
            out[v * m + self.assign[u]] += 1;
        }
        out
    }

    /// Scores replacing the `before` communities by the `after` ones.
    pub fn change(&self, before: &[Counts], after: &[Counts]) -> Change {
        let mut density = Delta::zero();
        let mut violation = 0;
        for c in after {
            density += c.density();
            violation += c.violation(self.weak);
        }
        for c in before {
            density -= c.density();
            violation -= c.violation(self.weak);
        }
        Change { density, violation }
    }

    fn check_relocate(&self, v: usize, from: usize, to: usize) -> Result<(), MoveError> {
        if to >= self.m() {
            return Err(MoveError::NoSuchCommunity(to));
        }
        if self.assign[v] != from {
            return Err(MoveError::WrongSource {
                vertex: v,
                actual: self.assign[v],
                claimed: from,
            });
        }
        if from == to {
            return Err(MoveError::SameCommunity(from));
        }
        if self.counts[from].size == 1 && self.m() <= self.min_communities {
            return Err(MoveError::WouldEmpty(from));
        }
        Ok(())
    }

    /// Counts of `from` and `to` after moving `v`, given its link counts.
    pub fn relocate_counts(&self, v: usize, from: usize, to: usize, l_from: i64, l_to: i64) -> (Counts, Counts) {
        let k = self.g.degree(v) as i64;
        let a = self.counts[from];
        let b = self.counts[to];
        (
            Counts {
                size: a.size - 1,
                internal: a.internal - l_from,
                degree_sum: a.degree_sum - k,
            },
            Counts {
                size: b.size + 1,
                internal: b.internal + l_to,
                degree_sum: b.degree_sum + k,
            },
        )
    }

    pub(crate) fn relocate_change_with(&self, v: usize, from: usize, to: usize, l_from: i64, l_to: i64) -> Change {
        let (a, b) = self.relocate_counts(v, from, to, l_from, l_to);
        let before = [self.counts[from], self.counts[to]];
        if a.size == 0 {
            self.change(&before, &[b])
        } else {
            self.change(&before, &[a, b])
        }
    }

    /// Exact change in `D` from moving `v` out of `from` into `to`, in time
    /// proportional to the degree of `v`.
    pub fn delta_relocate(&self, v: usize, from: usize, to: usize) -> Result<Delta, MoveError> {
        self.check_relocate(v, from, to)?;
        let (l_from, l_to) = self.g.neighbors(v).iter().fold((0, 0), |(a, b), &u| {
            let c = self.assign[u];
            (a + i64::from(c == from), b + i64::from(c == to))
        });
        Ok(self.relocate_change_with(v, from, to, l_from, l_to).density)
    }

    /// Moves `v` to community `to`. An emptied community is removed and the
    /// last community takes its index.
    pub fn relocate(&mut self, v: usize, to: usize) -> Result<(), MoveError> {
        let from = self.assign[v];
        self.check_relocate(v, from, to)?;
        let (l_from, l_to) = (self.links(v, from), self.links(v, to));
        let (a, b) = self.relocate_counts(v, from, to, l_from, l_to);
        self.counts[from] = a;
        self.counts[to] = b;
        self.assign[v] = to;
        self.members[from].retain(|&u| u != v);
        self.members[to].push(v);
        if a.size == 0 {
            self.remove_empty(from);
        }
        self.debug_check();
        Ok(())
    }

    fn remove_empty(&mut self, c: usize) {
        debug_assert!(self.members[c].is_empty());
        let last = self.m() - 1;
        self.counts.swap_remove(c);
        self.members.swap_remove(c);
        if c != last {
            for &u in &self.members[c] {
                self.assign[u] = c;
            }
        }
    }

    /// Counts of the two communities after swapping `u` (in `a`) and `v` (in
    /// `b`), given link counts of both vertices to both communities.
    pub fn swap_counts(&self, u: usize, v: usize, links_u: (i64, i64), links_v: (i64, i64)) -> (Counts, Counts) {
        let (a, b) = (self.assign[u], self.assign[v]);
        let adj = i64::from(self.g.has_edge(u, v));
        let (ku, kv) = (self.g.degree(u) as i64, self.g.degree(v) as i64);
        let ca = self.counts[a];
        let cb = self.counts[b];
        (
            Counts {
                size: ca.size,
                internal: ca.internal - links_u.0 + links_v.0 - adj,
                degree_sum: ca.degree_sum - ku + kv,
            },
            Counts {
                size: cb.size,
                internal: cb.internal - links_v.1 + links_u.1 - adj,
                degree_sum: cb.degree_sum - kv + ku,
            },
        )
    }

    /// Exchanges the communities of `u` and `v`.
    pub fn swap(&mut self, u: usize, v: usize) {
        let (a, b) = (self.assign[u], self.assign[v]);
        assert_ne!(a, b, "swap needs vertices in different communities");
        let links_u = (self.links(u, a), self.links(u, b));
        let links_v = (self.links(v, a), self.links(v, b));
        let (na, nb) = self.swap_counts(u, v, links_u, links_v);
        self.counts[a] = na;
        self.counts[b] = nb;
        self.assign[u] = b;
        self.assign[v] = a;
        self.members[a].retain(|&x| x != u);
        self.members[a].push(v);
        self.members[b].retain(|&x| x != v);
        self.members[b].push(u);
        self.debug_check();
    }

    /// Counts of the union of `a` and `b` joined by `between` edges.
    pub fn merge_counts(&self, a: usize, b: usize, between: i64) -> Counts {
        let (ca, cb) = (self.counts[a], self.counts[b]);
        Counts {
            size: ca.size + cb.size,
            internal: ca.internal + cb.internal + between,
            degree_sum: ca.degree_sum + cb.degree_sum,
        }
    }

    /// Merges community `b` into `a`.
    pub fn merge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b);
        let between: i64 = self.members[b].iter().map(|&v| self.links(v, a)).sum();
        self.counts[a] = self.merge_counts(a, b, between);
        let moved = std::mem::take(&mut self.members[b]);
        for &v in &moved {
            self.assign[v] = a;
        }
        self.members[a].extend(moved);
        self.counts[b] = Counts::default();
        self.remove_empty(b);
        self.debug_check();
    }

    /// Moves `part` (a proper, non-empty subset of community `c`) into a new
    /// community.
    pub fn split(&mut self, c: usize, part: &[usize]) {
        debug_assert!(!part.is_empty() && part.len() < self.members[c].len());
        let new = self.m();
        for &v in part {
            debug_assert_eq!(self.assign[v], c);
            self.assign[v] = new;
        }
        self.members[c].retain(|&v| self.assign[v] == c);
        self.members.push(part.to_vec());
        self.counts.push(Counts::default());
        for idx in [c, new] {
            let mut counts = Counts {
                size: self.members[idx].len() as i64,
                ..Counts::default()
            };
            for &v in &self.members[idx] {
                counts.degree_sum += self.g.degree(v) as i64;
                counts.internal += self.links(v, idx);
            }
            counts.internal /= 2;
            self.counts[idx] = counts;
        }
        self.debug_check();
    }

    /// Recomputes every count from scratch and compares (debug builds only).
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        {
            let fresh = SearchState::new(self.g, &self.partition(), self.min_communities, self.weak);
            let mut mine: Vec<(Vec<usize>, Counts)> = self
                .members
                .iter()
                .zip(&self.counts)
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.sort_unstable();
                    (m, *c)
                })
                .collect();
            let mut theirs: Vec<(Vec<usize>, Counts)> =
                fresh.members.iter().cloned().zip(fresh.counts.iter().copied()).collect();
            mine.sort();
            theirs.sort();
            assert_eq!(mine, theirs, "incremental counts diverged from recomputation");
            for (c, members) in self.members.iter().enumerate() {
                assert!(members.iter().all(|&v| self.assign[v] == c));
            }
        }
    }
}
