//! Benchmark networks with their reference partitions.
//!
//! * [`clique_star`]: a hub clique with satellite cliques hanging off it. With
//!   `(3, 7, 4)` the best unconstrained partition keeps the triangle hub as a
//!   community of negative density.
//! * [`fig2`]: a triangle whose vertices each attach to a 5-clique. The best
//!   3-community partition splits the triangle.
//! * [`zachary`]: the karate club network and four reference partitions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::decimal::{parse_decimal, render, Precision};
use crate::graph::Graph;
use crate::metrics;
use crate::partition::Partition;

const KARATE_EDGES: &str = include_str!("../data/karate.edges");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("clique-star needs hub >= 3, satellites >= 1, satellite size >= 2 (got {hub}, {satellites}, {size})")]
    CliqueStarParams {
        hub: usize,
        satellites: usize,
        size: usize,
    },
}

/// Reference values for a named partition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expected {
    /// Exact modularity density, when the value is known as a fraction.
    pub exact_d: Option<BigRational>,
    /// Modularity density as printed (six significant digits).
    pub printed_d: Option<&'static str>,
    /// Modularity as printed.
    pub printed_q: Option<&'static str>,
}

/// Half a unit in the last printed place of a decimal literal.
pub fn half_unit(printed: &str) -> BigRational {
    let places = printed.split_once('.').map_or(0, |(_, frac)| frac.len());
    BigRational::new(
        BigInt::from(5),
        num_traits::pow(BigInt::from(10), places + 1),
    )
}

/// Checks an exact value against a printed decimal: the six-digit rendering
/// must agree digit for digit and the printed number must lie within half a
/// unit of its last place.
pub fn matches_printed(exact: &BigRational, printed: &str) -> bool {
    let Some(value) = parse_decimal(printed) else {
        return false;
    };
    (exact - value).abs() <= half_unit(printed) && render(exact, Precision::default()) == printed
}

impl Expected {
    /// True when the partition's measured values agree with every recorded
    /// reference value.
    pub fn check(&self, g: &Graph, p: &Partition) -> bool {
        let d = metrics::modularity_density(g, p);
        if self.exact_d.as_ref().is_some_and(|e| *e != d) {
            return false;
        }
        if self.printed_d.is_some_and(|s| !matches_printed(&d, s)) {
            return false;
        }
        if let Some(s) = self.printed_q {
            match metrics::modularity(g, p) {
                Ok(q) if matches_printed(&q, s) => {}
                _ => return false,
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedPartition {
    pub name: &'static str,
    pub partition: Partition,
    pub expected: Expected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedInstance {
    pub name: String,
    pub graph: Graph,
    pub partitions: Vec<NamedPartition>,
}

impl NamedInstance {
    pub fn partition(&self, name: &str) -> Option<&Partition> {
        self.partitions
            .iter()
            .find(|p| p.name == name)
            .map(|p| &p.partition)
    }
}

/// Which hub vertex each satellite attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attachment {
    /// Satellite `i` attaches to hub vertex `((i - 1) mod hub) + 1`.
    RoundRobin,
    /// Every satellite attaches to hub vertex 1.
    FirstHubVertex,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn clique(vertices: &[usize], edges: &mut Vec<(usize, usize)>) {
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            edges.push((u, v));
        }
    }
}

pub fn clique_star(hub: usize, satellites: usize, size: usize) -> Result<NamedInstance, GeneratorError> {
    clique_star_with(hub, satellites, size, Attachment::RoundRobin)
}

/// Hub clique on vertices `1..=hub`; satellite `i` is a clique on
/// `hub + (i-1)*size + 1 ..= hub + i*size` whose first vertex has one edge to
/// the hub.
pub fn clique_star_with(
    hub: usize,
    satellites: usize,
    size: usize,
    attachment: Attachment,
) -> Result<NamedInstance, GeneratorError> {
    if hub < 3 || satellites < 1 || size < 2 {
        return Err(GeneratorError::CliqueStarParams {
            hub,
            satellites,
            size,
        });
    }
    let n = hub + satellites * size;
    let hub_vertices: Vec<usize> = (0..hub).collect();
    let mut edges = Vec::new();
    clique(&hub_vertices, &mut edges);
    let mut blocks = vec![hub_vertices];
    let mut anchors = Vec::with_capacity(satellites);
    for i in 0..satellites {
        let start = hub + i * size;
        let members: Vec<usize> = (start..start + size).collect();
        clique(&members, &mut edges);
        blocks.push(members);
    }
    for i in 0..satellites {
        let anchor = match attachment {
            Attachment::RoundRobin => i % hub,
            Attachment::FirstHubVertex => 0,
        };
        anchors.push(anchor);
        edges.push((anchor, hub + i * size));
    }
    let graph = Graph::from_edges(n, edges).expect("clique-star edges are simple");

    let split = Partition::from_blocks(n, &blocks).expect("blocks cover the graph");
    // Hub merges with a satellite attached to hub vertex 3, or the first one.
    let target = anchors.iter().position(|&a| a == 2).unwrap_or(0);
    let mut merged_blocks = blocks.clone();
    let sat = merged_blocks.remove(target + 1);
    merged_blocks[0].extend(sat);
    let merged = Partition::from_blocks(n, &merged_blocks).expect("blocks cover the graph");

    let reference = (hub, satellites, size) == (3, 7, 4);
    let pick = |exact: BigRational, printed: &'static str| {
        if reference {
            Expected {
                exact_d: Some(exact),
                printed_d: Some(printed),
                printed_q: None,
            }
        } else {
            Expected::default()
        }
    };
    Ok(NamedInstance {
        name: format!("clique-star-{hub}-{satellites}-{size}"),
        graph,
        partitions: vec![
            NamedPartition {
                name: "split",
                partition: split,
                expected: pick(ratio(227, 12), "18.9167"),
            },
            NamedPartition {
                name: "merged",
                partition: merged,
                expected: pick(ratio(37, 2), "18.5"),
            },
        ],
    })
}

/// Triangle `{1, 6, 11}`; 5-cliques `{2,3,4,5,16}`, `{7,8,9,10,17}`,
/// `{12,13,14,15,18}`; each triangle vertex links to the three lowest members
/// of its clique.
pub fn fig2() -> NamedInstance {
    let n = 18;
    let hubs = [1usize, 6, 11];
    let cliques: [[usize; 5]; 3] = [[2, 3, 4, 5, 16], [7, 8, 9, 10, 17], [12, 13, 14, 15, 18]];
    let zero = |v: &[usize]| v.iter().map(|&x| x - 1).collect::<Vec<_>>();

    let mut edges = Vec::new();
    clique(&zero(&hubs), &mut edges);
    for c in &cliques {
        clique(&zero(c), &mut edges);
    }
    for (h, c) in hubs.iter().zip(&cliques) {
        for &t in &c[..3] {
            edges.push((h - 1, t - 1));
        }
    }
    let graph = Graph::from_edges(n, edges).expect("fig2 edges are simple");

    let four = Partition::from_blocks_1based(n, &[&hubs, &cliques[0], &cliques[1], &cliques[2]])
        .expect("valid blocks");
    let absorbed: Vec<Vec<usize>> = hubs
        .iter()
        .zip(&cliques)
        .map(|(&h, c)| std::iter::once(h).chain(c.iter().copied()).collect())
        .collect();
    let absorbed_refs: Vec<&[usize]> = absorbed.iter().map(Vec::as_slice).collect();
    let three = Partition::from_blocks_1based(n, &absorbed_refs).expect("valid blocks");

    NamedInstance {
        name: "fig2".into(),
        graph,
        partitions: vec![
            NamedPartition {
                name: "four",
                partition: four,
                expected: Expected {
                    exact_d: Some(ratio(46, 5)),
                    printed_d: Some("9.2"),
                    printed_q: None,
                },
            },
            NamedPartition {
                name: "three",
                partition: three,
                expected: Expected {
                    exact_d: Some(ratio(12, 1)),
                    printed_d: Some("12"),
                    printed_q: None,
                },
            },
        ],
    }
}

pub fn zachary_graph() -> Graph {
    Graph::parse_edge_list(KARATE_EDGES).expect("embedded karate edge list is valid")
}

const ZACHARY_LEFT: [usize; 16] = [1, 2, 3, 4, 5, 6, 7, 8, 11, 12, 13, 14, 17, 18, 20, 22];
const ZACHARY_SMALL: [usize; 5] = [5, 6, 7, 11, 17];
const ZACHARY_CORE: [usize; 11] = [1, 2, 3, 4, 8, 12, 13, 14, 18, 20, 22];

/// The karate club network with its 2-, 3- and 4-community reference
/// partitions. `m4_authors` differs from `m4_optimal` only in vertices 24 and
/// 28, which sit with `{25, 26, 29, 32}`.
pub fn zachary() -> NamedInstance {
    let graph = zachary_graph();
    let n = graph.n();
    let complement = |block: &[usize]| -> Vec<usize> { (1..=n).filter(|v| !block.contains(v)).collect() };

    let m2_right = complement(&ZACHARY_LEFT);
    let m2 = Partition::from_blocks_1based(n, &[&ZACHARY_LEFT, &m2_right]).unwrap();

    let m3 = Partition::from_blocks_1based(
        n,
        &[
            &[1, 2, 3, 4, 8, 10, 12, 13, 14, 18, 20, 22],
            &[9, 15, 16, 19, 21, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34],
            &ZACHARY_SMALL,
        ],
    )
    .unwrap();

    let m4_optimal = Partition::from_blocks_1based(
        n,
        &[
            &ZACHARY_SMALL,
            &ZACHARY_CORE,
            &[25, 26, 29, 32],
            &[9, 10, 15, 16, 19, 21, 23, 24, 27, 28, 30, 31, 33, 34],
        ],
    )
    .unwrap();

    let m4_authors = Partition::from_blocks_1based(
        n,
        &[
            &ZACHARY_SMALL,
            &ZACHARY_CORE,
            &[24, 25, 26, 28, 29, 32],
            &[9, 10, 15, 16, 19, 21, 23, 27, 30, 31, 33, 34],
        ],
    )
    .unwrap();

    let printed = |d, q| Expected {
        exact_d: None,
        printed_d: Some(d),
        printed_q: Some(q),
    };
    NamedInstance {
        name: "zachary".into(),
        graph,
        partitions: vec![
            NamedPartition {
                name: "m2",
                partition: m2,
                expected: printed("6.83333", "0.371466"),
            },
            NamedPartition {
                name: "m3",
                partition: m3,
                expected: printed("7.8451", "0.402038"),
            },
            NamedPartition {
                name: "m4_optimal",
                partition: m4_optimal,
                expected: printed("7.54481", "0.415105"),
            },
            NamedPartition {
                name: "m4_authors",
                partition: m4_authors,
                expected: printed("7.50909", "0.41979"),
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{community_density, modularity_density};
    use num_rational::Ratio;

    #[test]
    fn clique_star_shape() {
        let inst = clique_star(3, 7, 4).unwrap();
        assert_eq!(inst.graph.n(), 31);
        assert_eq!(inst.graph.edge_count(), 3 + 7 * 6 + 7);
        // Satellite i occupies 4i..4i+3 (1-based).
        let split = inst.partition("split").unwrap();
        for i in 1..=7usize {
            let c = split.community_of(4 * i - 1);
            assert!((4 * i..4 * i + 4).all(|v| split.community_of(v - 1) == c));
        }
        // Third satellite hangs off hub vertex 3.
        assert!(inst.graph.has_edge(2, 11));
    }

    #[test]
    fn clique_star_reference_values() {
        let inst = clique_star(3, 7, 4).unwrap();
        for np in &inst.partitions {
            assert!(np.expected.check(&inst.graph, &np.partition), "{}", np.name);
        }
        let merged = inst.partition("merged").unwrap();
        assert_eq!(merged.m(), 7);
        let hub_comm = merged.community_of(0);
        assert_eq!(
            community_density(&inst.graph, merged, hub_comm).unwrap(),
            Ratio::new(2, 1)
        );
    }

    #[test]
    fn clique_star_values_ignore_attachment_placement() {
        let rr = clique_star_with(3, 7, 4, Attachment::RoundRobin).unwrap();
        let one = clique_star_with(3, 7, 4, Attachment::FirstHubVertex).unwrap();
        assert_ne!(rr.graph, one.graph);
        for name in ["split", "merged"] {
            assert_eq!(
                modularity_density(&rr.graph, rr.partition(name).unwrap()),
                modularity_density(&one.graph, one.partition(name).unwrap()),
                "{name}"
            );
        }
    }

    #[test]
    fn clique_star_bounds() {
        assert!(clique_star(2, 7, 4).is_err());
        assert!(clique_star(3, 0, 4).is_err());
        assert!(clique_star(3, 1, 1).is_err());
        let small = clique_star(4, 2, 3).unwrap();
        assert_eq!(small.graph.edge_count(), 6 + 2 * 3 + 2);
        assert_eq!(small.partition("merged").unwrap().m(), 2);
    }

    #[test]
    fn fig2_shape_and_values() {
        let inst = fig2();
        assert_eq!(inst.graph.n(), 18);
        assert_eq!(inst.graph.edge_count(), 42);
        for np in &inst.partitions {
            assert!(np.expected.check(&inst.graph, &np.partition), "{}", np.name);
        }
        let three = inst.partition("three").unwrap();
        for l in 0..3 {
            assert_eq!(
                community_density(&inst.graph, three, l).unwrap(),
                Ratio::new(4, 1)
            );
        }
    }

    #[test]
    fn zachary_dataset() {
        let g = zachary_graph();
        assert_eq!(g.n(), 34);
        assert_eq!(g.edge_count(), 78);
        assert_eq!(g.degree(33), 17);
        assert_eq!(g.degree(0), 16);
    }

    #[test]
    fn zachary_reference_values() {
        let inst = zachary();
        for np in &inst.partitions {
            assert!(np.expected.check(&inst.graph, &np.partition), "{}", np.name);
        }
        let m2 = inst.partition("m2").unwrap();
        assert_eq!(m2.sizes(), vec![16, 18]);
        assert_eq!(modularity_density(&inst.graph, m2), ratio(41, 6));
    }

    #[test]
    fn printed_matching_rejects_near_misses() {
        assert!(matches_printed(&ratio(227, 12), "18.9167"));
        assert!(!matches_printed(&ratio(227, 12), "18.9166"));
        assert!(!matches_printed(&ratio(413, 55), "7.50910"));
    }
}
