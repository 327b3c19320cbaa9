//! Modularity, modularity density, and the weak community condition.
//!
//! For a community `l` with `n_l` vertices, `e_l` internal edges and degree
//! sum `K_l`, the cut is `c_l = K_l - 2 e_l` and the community density is
//!
//! ```text
//! d_l = (2 e_l - c_l) / n_l = (4 e_l - K_l) / n_l
//! ```
//!
//! The modularity density of a partition is `D = sum_l d_l`. All values are
//! exact rationals; decimals are produced only when rendering.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::decimal::{big, ratio_string, render, Precision};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("community {index} out of range (partition has {m})")]
    CommunityOutOfRange { index: usize, m: usize },
    #[error("modularity undefined for a graph without edges")]
    ModularityUndefined,
    #[error("weak-condition offset must be 0 or 1, got {0}")]
    InvalidWeakOffset(u8),
}

/// Right-hand-side offset `L` of the weak constraint `4 e_l >= K_l + L`.
///
/// `NonNegative` (`L = 0`) forces `d_l >= 0`; `Strict` (`L = 1`) is the weak
/// community definition with its strict inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Weak {
    NonNegative,
    Strict,
}

impl Weak {
    pub fn offset(self) -> i64 {
        match self {
            Weak::NonNegative => 0,
            Weak::Strict => 1,
        }
    }

    /// `4 e - K >= L` for the given community balance `4 e - K`.
    pub fn holds(self, balance: i64) -> bool {
        balance >= self.offset()
    }
}

impl TryFrom<u8> for Weak {
    type Error = MetricsError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            0 => Ok(Weak::NonNegative),
            1 => Ok(Weak::Strict),
            other => Err(MetricsError::InvalidWeakOffset(other)),
        }
    }
}

/// Exact integer counts for one community.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CommunityStats {
    pub size: usize,
    pub internal_edges: usize,
    pub degree_sum: usize,
    pub cut: usize,
}

impl CommunityStats {
    /// `4 e - K`, the numerator of the community density.
    pub fn balance(&self) -> i64 {
        4 * self.internal_edges as i64 - self.degree_sum as i64
    }

    pub fn density(&self) -> Ratio<i64> {
        Ratio::new(self.balance(), self.size as i64)
    }

    pub fn satisfies(&self, weak: Weak) -> bool {
        weak.holds(self.balance())
    }
}

/// Stats for every community in one pass over vertices and edges.
pub fn all_stats(g: &Graph, p: &Partition) -> Vec<CommunityStats> {
    let mut stats = vec![CommunityStats::default(); p.m()];
    for v in 0..g.n() {
        let s = &mut stats[p.community_of(v)];
        s.size += 1;
        s.degree_sum += g.degree(v);
    }
    for &(u, v) in g.edges() {
        let c = p.community_of(u);
        if c == p.community_of(v) {
            stats[c].internal_edges += 1;
        }
    }
    for s in &mut stats {
        s.cut = s.degree_sum - 2 * s.internal_edges;
    }
    stats
}

fn check_index(p: &Partition, l: usize) -> Result<(), MetricsError> {
    if l >= p.m() {
        return Err(MetricsError::CommunityOutOfRange { index: l, m: p.m() });
    }
    Ok(())
}

pub fn community_stats(g: &Graph, p: &Partition, l: usize) -> Result<CommunityStats, MetricsError> {
    check_index(p, l)?;
    let mut s = CommunityStats::default();
    for v in 0..g.n() {
        if p.community_of(v) == l {
            s.size += 1;
            s.degree_sum += g.degree(v);
            s.internal_edges += g
                .neighbors(v)
                .iter()
                .filter(|&&u| u > v && p.community_of(u) == l)
                .count();
        }
    }
    s.cut = s.degree_sum - 2 * s.internal_edges;
    Ok(s)
}

pub fn community_density(g: &Graph, p: &Partition, l: usize) -> Result<Ratio<i64>, MetricsError> {
    Ok(community_stats(g, p, l)?.density())
}

pub fn modularity_density(g: &Graph, p: &Partition) -> BigRational {
    all_stats(g, p)
        .iter()
        .map(|s| big(s.density()))
        .fold(BigRational::zero(), |acc, d| acc + d)
}

pub fn modularity(g: &Graph, p: &Partition) -> Result<BigRational, MetricsError> {
    let total = 2 * g.edge_count() as i64;
    if total == 0 {
        return Err(MetricsError::ModularityUndefined);
    }
    let total = BigInt::from(total);
    Ok(all_stats(g, p)
        .iter()
        .map(|s| {
            let inside = BigRational::new(BigInt::from(2 * s.internal_edges), total.clone());
            let share = BigRational::new(BigInt::from(s.degree_sum), total.clone());
            inside - &share * &share
        })
        .fold(BigRational::zero(), |acc, q| acc + q))
}

pub fn weak_condition(g: &Graph, p: &Partition, l: usize, weak: Weak) -> Result<bool, MetricsError> {
    Ok(community_stats(g, p, l)?.satisfies(weak))
}

/// True when every community satisfies the weak constraint.
pub fn all_weak(g: &Graph, p: &Partition, weak: Weak) -> bool {
    all_stats(g, p).iter().all(|s| s.satisfies(weak))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityEntry {
    pub stats: CommunityStats,
    pub density: Ratio<i64>,
    pub weak_l0: bool,
    pub weak_l1: bool,
}

/// Per-community breakdown plus the partition totals.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityReport {
    pub communities: Vec<CommunityEntry>,
    pub modularity_density: BigRational,
    /// `None` for edgeless graphs.
    pub modularity: Option<BigRational>,
}

pub fn full_report(g: &Graph, p: &Partition) -> CommunityReport {
    let communities: Vec<CommunityEntry> = all_stats(g, p)
        .into_iter()
        .map(|stats| CommunityEntry {
            stats,
            density: stats.density(),
            weak_l0: stats.satisfies(Weak::NonNegative),
            weak_l1: stats.satisfies(Weak::Strict),
        })
        .collect();
    let modularity_density = communities
        .iter()
        .fold(BigRational::zero(), |acc, c| acc + big(c.density));
    CommunityReport {
        communities,
        modularity_density,
        modularity: modularity(g, p).ok(),
    }
}

impl CommunityReport {
    pub fn violations(&self, weak: Weak) -> Vec<usize> {
        self.communities
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.stats.satisfies(weak))
            .map(|(i, _)| i)
            .collect()
    }

    /// JSON form with 1-based community ids; every value is given both as an
    /// exact rational string and a decimal.
    pub fn to_json(&self, precision: Precision) -> serde_json::Value {
        let communities: Vec<_> = self
            .communities
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = big(c.density);
                CommunityJson {
                    id: i + 1,
                    size: c.stats.size,
                    internal_edges: c.stats.internal_edges,
                    degree_sum: c.stats.degree_sum,
                    cut: c.stats.cut,
                    density: render(&d, precision),
                    density_exact: ratio_string(&d),
                    weak_l0: c.weak_l0,
                    weak_l1: c.weak_l1,
                }
            })
            .collect();
        serde_json::json!({
            "communities": communities,
            "D": render(&self.modularity_density, precision),
            "D_exact": ratio_string(&self.modularity_density),
            "Q": self.modularity.as_ref().map(|q| render(q, precision)),
            "Q_exact": self.modularity.as_ref().map(ratio_string),
        })
    }
}

#[derive(Serialize)]
struct CommunityJson {
    id: usize,
    size: usize,
    internal_edges: usize,
    degree_sum: usize,
    cut: usize,
    density: String,
    density_exact: String,
    #[serde(rename = "weak_L0")]
    weak_l0: bool,
    #[serde(rename = "weak_L1")]
    weak_l1: bool,
}
