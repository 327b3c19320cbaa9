//! In-process maximization of modularity density.
//!
//! Three methods share one configuration and result type:
//!
//! * [`solve_exhaustive`] scans every partition (n <= 14) and is the oracle
//!   the others are tested against;
//! * [`solve_branch_and_bound`] proves optimality for a fixed community count
//!   on graphs of a few dozen vertices;
//! * [`solve_local_search`] is a seeded multi-start heuristic for anything
//!   larger.
//!
//! All comparisons use exact rationals, and every tie is broken by a fixed
//! order so results are reproducible.

mod bnb;
mod enumerate;
mod exhaustive;
mod local_search;
mod state;

use std::time::Duration;

use num_rational::{BigRational, Ratio};
use serde_json::json;
use thiserror::Error;

use crate::decimal::{ratio_string, render, Precision};
use crate::graph::Graph;
use crate::metrics::{full_report, CommunityReport, Weak};
use crate::partition::Partition;

pub use bnb::{node_bound, solve_branch_and_bound};
pub use enumerate::{enumerate_partitions, RestrictedGrowth, MAX_ENUMERATION_N};
pub use exhaustive::solve_exhaustive;
pub use local_search::solve_local_search;
pub use state::{Change, Counts, Delta, MoveError, SearchState};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("refusing to enumerate partitions of {n} vertices (max {max}): the Bell number of {n} is too large to scan")]
    TooLarge { n: usize, max: usize },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("no partition satisfies the constraints")]
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    BranchAndBound,
    LocalSearch,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exhaustive => "exhaustive",
            Method::BranchAndBound => "bnb",
            Method::LocalSearch => "local-search",
        }
    }
}

/// Range of community counts to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommunityRange {
    /// Any count from 2 (or 1 with `allow_single`) up to n.
    Free,
    /// Inclusive bounds.
    Between(usize, usize),
}

impl CommunityRange {
    pub fn fixed(m: usize) -> Self {
        CommunityRange::Between(m, m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub range: CommunityRange,
    pub weak: Option<Weak>,
    /// Admit the one-community partition (oracle studies only).
    pub allow_single: bool,
    pub seed: u64,
    pub restarts: usize,
    /// Perturbation rounds without improvement before a restart ends.
    pub max_stale_iterations: usize,
    /// Penalty per unit of weak-constraint shortfall; `None` means n.
    pub penalty_rho: Option<Ratio<i64>>,
    /// Worker threads for restarts; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::LocalSearch,
            range: CommunityRange::Free,
            weak: None,
            allow_single: false,
            seed: 0,
            restarts: 32,
            max_stale_iterations: 30,
            penalty_rho: None,
            threads: None,
        }
    }
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        SolverConfig {
            method,
            ..Default::default()
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.range = CommunityRange::fixed(m);
        self
    }

    pub fn with_range(mut self, range: CommunityRange) -> Self {
        self.range = range;
        self
    }

    pub fn with_weak(mut self, weak: Option<Weak>) -> Self {
        self.weak = weak;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    /// Validated inclusive community-count range for an `n`-vertex graph.
    pub fn resolve_range(&self, n: usize) -> Result<(usize, usize), SolveError> {
        let floor = if self.allow_single { 1 } else { 2 };
        let (lo, hi) = match self.range {
            CommunityRange::Free => (floor, n),
            CommunityRange::Between(lo, hi) => (lo, hi),
        };
        if lo < floor {
            return Err(SolveError::Config(format!(
                "minimum community count must be at least {floor}, got {lo}"
            )));
        }
        if lo > hi {
            return Err(SolveError::Config(format!("empty community range {lo}..={hi}")));
        }
        if hi > n {
            return Err(SolveError::Config(format!(
                "{hi} communities requested for a graph with {n} vertices"
            )));
        }
        if self.restarts == 0 || self.max_stale_iterations == 0 {
            return Err(SolveError::Config("restarts and stale iterations must be positive".into()));
        }
        if self.penalty_rho.is_some_and(|r| r <= Ratio::from_integer(0)) {
            return Err(SolveError::Config("penalty must be positive".into()));
        }
        Ok((lo, hi))
    }

    pub(crate) fn rho(&self, n: usize) -> Delta {
        let r = self.penalty_rho.unwrap_or(Ratio::from_integer(n as i64));
        Delta::new(*r.numer() as i128, *r.denom() as i128)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    ProvedOptimal,
    Heuristic,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::ProvedOptimal => "proved-optimal",
            Status::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub method: Method,
    pub seed: u64,
    pub best: Partition,
    pub modularity_density: BigRational,
    pub report: CommunityReport,
    pub status: Status,
    /// Leaves scanned (exhaustive), nodes expanded (bnb), or moves plus
    /// perturbations applied (local search).
    pub counter: u64,
    pub wall_time: Duration,
}

impl SolveResult {
    pub(crate) fn new(
        g: &Graph,
        cfg: &SolverConfig,
        best: Partition,
        status: Status,
        counter: u64,
        wall_time: Duration,
    ) -> Self {
        let report = full_report(g, &best);
        SolveResult {
            method: cfg.method,
            seed: cfg.seed,
            modularity_density: report.modularity_density.clone(),
            best,
            report,
            status,
            counter,
            wall_time,
        }
    }

    pub fn m(&self) -> usize {
        self.best.m()
    }

    /// JSON form; wall time is included only when asked for so that repeated
    /// runs produce identical bytes.
    pub fn to_json(&self, precision: Precision, include_time: bool) -> serde_json::Value {
        let partition: serde_json::Map<String, serde_json::Value> = self
            .best
            .assign()
            .iter()
            .enumerate()
            .map(|(v, &c)| ((v + 1).to_string(), json!(c + 1)))
            .collect();
        let mut out = json!({
            "method": self.method.name(),
            "seed": self.seed,
            "m": self.m(),
            "D": render(&self.modularity_density, precision),
            "D_exact": ratio_string(&self.modularity_density),
            "status": self.status.name(),
            "partition": partition,
            "report": self.report.to_json(precision),
            "counter": self.counter,
        });
        if include_time {
            out["wall_time_ms"] = json!(self.wall_time.as_millis() as u64);
        }
        out
    }
}

/// Runs the configured method.
pub fn solve(g: &Graph, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    match cfg.method {
        Method::Exhaustive => solve_exhaustive(g, cfg),
        Method::BranchAndBound => solve_branch_and_bound(g, cfg),
        Method::LocalSearch => solve_local_search(g, cfg),
    }
}

/// Least common multiple of `1..=n`, used to compare sums of densities as
/// integers.
pub(crate) fn lcm_upto(n: usize) -> i128 {
    (1..=n as i128).fold(1i128, num_integer::lcm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_validation() {
        let cfg = SolverConfig::default();
        assert_eq!(cfg.resolve_range(5), Ok((2, 5)));
        let single = SolverConfig {
            allow_single: true,
            ..SolverConfig::default()
        };
        assert_eq!(single.resolve_range(5), Ok((1, 5)));
        assert!(cfg.clone().with_m(1).resolve_range(5).is_err());
        assert!(cfg.clone().with_m(6).resolve_range(5).is_err());
        assert!(cfg
            .clone()
            .with_range(CommunityRange::Between(4, 3))
            .resolve_range(5)
            .is_err());
        assert!(cfg.clone().with_restarts(0).resolve_range(5).is_err());
    }

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_upto(14), 360_360);
        assert_eq!(lcm_upto(1), 1);
    }
}
