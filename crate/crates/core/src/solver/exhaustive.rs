//! Exhaustive scan over every partition, in restricted-growth order.

use std::time::Instant;

use crate::graph::Graph;
use crate::metrics::Weak;
use crate::partition::Partition;

use super::enumerate::check_size;
use super::{lcm_upto, SolveError, SolveResult, SolverConfig, Status};

struct Scan<'a> {
    g: &'a Graph,
    n: usize,
    lo: usize,
    hi: usize,
    weak: Option<Weak>,
    scale: i64,
    labels: Vec<usize>,
    size: Vec<i64>,
    internal: Vec<i64>,
    degree_sum: Vec<i64>,
    /// `links[v * n + c]`: earlier neighbors of `v` in community `c`.
    links: Vec<i64>,
    best: Option<(i64, Vec<usize>)>,
    leaves: u64,
}

impl Scan<'_> {
    fn descend(&mut self, v: usize, used: usize) {
        if v == self.n {
            self.leaf(used);
            return;
        }
        // Not enough vertices left to open the required communities.
        if used + (self.n - v) < self.lo {
            return;
        }
        let row = v * self.n;
        self.links[row..row + self.n].fill(0);
        for &u in self.g.neighbors(v) {
            if u < v {
                self.links[row + self.labels[u]] += 1;
            }
        }
        let k = self.g.degree(v) as i64;
        let top = if used < self.hi { used } else { used - 1 };
        for c in 0..=top {
            let l = self.links[row + c];
            self.labels[v] = c;
            self.size[c] += 1;
            self.internal[c] += l;
            self.degree_sum[c] += k;
            self.descend(v + 1, used.max(c + 1));
            self.size[c] -= 1;
            self.internal[c] -= l;
            self.degree_sum[c] -= k;
        }
    }

    fn leaf(&mut self, used: usize) {
        if used < self.lo {
            return;
        }
        self.leaves += 1;
        let mut value = 0i64;
        for c in 0..used {
            let balance = 4 * self.internal[c] - self.degree_sum[c];
            if self.weak.is_some_and(|w| !w.holds(balance)) {
                return;
            }
            value += balance * (self.scale / self.size[c]);
        }
        if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
            self.best = Some((value, self.labels.clone()));
        }
    }
}

/// Scans all partitions whose community count lies in the configured range
/// and returns the first one (in restricted-growth order) with the largest
/// modularity density. Partitions violating the weak constraint are skipped.
pub fn solve_exhaustive(g: &Graph, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let n = g.n();
    check_size(n)?;
    let (lo, hi) = cfg.resolve_range(n)?;
    let mut scan = Scan {
        g,
        n,
        lo,
        hi,
        weak: cfg.weak,
        scale: lcm_upto(n) as i64,
        labels: vec![0; n],
        size: vec![0; n],
        internal: vec![0; n],
        degree_sum: vec![0; n],
        links: vec![0; n * n],
        best: None,
        leaves: 0,
    };
    scan.descend(0, 0);
    let (_, labels) = scan.best.ok_or(SolveError::Infeasible)?;
    let best = Partition::from_labels(&labels).expect("non-empty");
    Ok(SolveResult::new(
        g,
        cfg,
        best,
        Status::ProvedOptimal,
        scan.leaves,
        start.elapsed(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::metrics::modularity_density;
    use crate::solver::{enumerate_partitions, CommunityRange, Method};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn exhaustive() -> SolverConfig {
        SolverConfig::new(Method::Exhaustive)
    }

    #[test]
    fn path_prefers_single_community_when_allowed() {
        let g = Graph::parse_edge_list("1 2\n2 3").unwrap();
        let cfg = SolverConfig {
            allow_single: true,
            ..exhaustive()
        };
        let r = solve_exhaustive(&g, &cfg).unwrap();
        assert_eq!(r.modularity_density, q(4, 3));
        assert_eq!(r.m(), 1);
        assert_eq!(r.counter, 5);
        assert_eq!(r.status, Status::ProvedOptimal);
    }

    #[test]
    fn two_cliques_split_at_bridge() {
        let mut text = String::new();
        for (a, b) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
            text.push_str(&format!("{a} {b}\n{} {}\n", a + 4, b + 4));
        }
        text.push_str("4 5\n");
        let g = Graph::parse_edge_list(&text).unwrap();
        let r = solve_exhaustive(&g, &exhaustive().with_m(2)).unwrap();
        assert_eq!(r.modularity_density, q(11, 2));
        assert_eq!(r.best.assign(), &[0, 0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn lone_clique_resists_splitting() {
        let g = Graph::parse_edge_list("1 2\n1 3\n1 4\n2 3\n2 4\n3 4").unwrap();
        let r = solve_exhaustive(&g, &exhaustive().with_m(2)).unwrap();
        assert_eq!(r.modularity_density, q(-2, 1));
        assert_eq!(r.counter, 7);
        // First in enumeration order among the 3+1 splits.
        assert_eq!(r.best.assign(), &[0, 0, 0, 1]);
    }

    #[test]
    fn matches_brute_force_over_enumeration() {
        let inst = generators::clique_star(3, 2, 3).unwrap();
        let g = &inst.graph;
        for weak in [None, Some(Weak::NonNegative), Some(Weak::Strict)] {
            let r = solve_exhaustive(g, &exhaustive().with_weak(weak).with_range(CommunityRange::Between(2, 4)));
            let brute = enumerate_partitions(g.n(), None)
                .unwrap()
                .filter(|p| (2..=4).contains(&p.m()))
                .filter(|p| weak.is_none_or(|w| crate::metrics::all_weak(g, p, w)))
                .map(|p| modularity_density(g, &p))
                .max();
            assert_eq!(r.ok().map(|r| r.modularity_density), brute);
        }
    }

    #[test]
    fn refuses_twenty_vertices() {
        let g = Graph::parse_edge_list("n=20\n1 2").unwrap();
        assert_eq!(
            solve_exhaustive(&g, &exhaustive()).unwrap_err(),
            SolveError::TooLarge { n: 20, max: 14 }
        );
    }

    #[test]
    fn infeasible_weak_constraint() {
        // No split of a star has every community weak.
        let g = Graph::parse_edge_list("1 2\n1 3\n1 4").unwrap();
        let cfg = exhaustive().with_weak(Some(Weak::Strict));
        assert_eq!(solve_exhaustive(&g, &cfg).unwrap_err(), SolveError::Infeasible);
    }
}
