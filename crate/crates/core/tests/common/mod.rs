//! Shared fixtures for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mdnet::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn k4() -> Graph {
    Graph::parse_edge_list("1 2\n1 3\n1 4\n2 3\n2 4\n3 4").unwrap()
}

pub fn p3() -> Graph {
    Graph::parse_edge_list("1 2\n2 3").unwrap()
}

/// Two 4-cliques joined by the edge 4-5.
pub fn bridged_cliques() -> Graph {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for u in 0..4 {
            for v in u + 1..4 {
                edges.push((base + u, base + v));
            }
        }
    }
    edges.push((3, 4));
    Graph::from_edges(8, edges).unwrap()
}

/// Erdos-Renyi graph with `n` vertices and edge probability `p`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// The fixed suite of small graphs: 20 seeded random graphs with
/// 3 to 8 vertices plus K4, P3 and the bridged cliques.
pub fn small_suite() -> Vec<(String, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out: Vec<(String, Graph)> = (0..20)
        .map(|i| {
            let n = rng.gen_range(3..=8);
            let p = rng.gen_range(0.25..0.8);
            (format!("random-{i}"), random_graph(&mut rng, n, p))
        })
        .collect();
    out.push(("K4".into(), k4()));
    out.push(("P3".into(), p3()));
    out.push(("bridged-cliques".into(), bridged_cliques()));
    out
}

/// Counts read back from LP text without using the emitter's data
/// structures: constraint rows under `Subject To` and distinct variable
/// names anywhere in the objective, rows, bounds and binary sections.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct LpSummary {
    pub rows: usize,
    pub variables: BTreeSet<String>,
    pub binaries: BTreeSet<String>,
}

fn is_name(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

pub fn read_lp(text: &str) -> LpSummary {
    let mut summary = LpSummary::default();
    let mut section = "";
    for line in text.lines() {
        if line.starts_with('\\') {
            continue;
        }
        let trimmed = line.trim();
        match trimmed {
            "Maximize" | "Minimize" | "Subject To" | "Bounds" | "Binary" | "End" => {
                section = match trimmed {
                    "Maximize" | "Minimize" => "objective",
                    "Subject To" => "rows",
                    "Bounds" => "bounds",
                    "Binary" => "binary",
                    _ => "end",
                };
                continue;
            }
            _ => {}
        }
        let body = if !line.starts_with("  ") {
            if section == "rows" {
                summary.rows += 1;
            }
            match trimmed.split_once(':') {
                Some((_, rest)) if section == "rows" || section == "objective" => rest,
                _ => trimmed,
            }
        } else {
            trimmed
        };
        for token in body.split_whitespace().filter(|t| is_name(t)) {
            summary.variables.insert(token.to_string());
            if section == "binary" {
                summary.binaries.insert(token.to_string());
            }
        }
    }
    summary
}
