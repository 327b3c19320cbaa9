//! Simple undirected graphs and the edge-list text format.
//!
//! Vertices are stored 0-based. Every text format reads and writes 1-based
//! labels.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {vertex} exceeds declared vertex count {n}")]
    LabelOutOfRange { vertex: usize, n: usize },
    #[error("graph has no vertices")]
    Empty,
}

/// Immutable simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    degree: Vec<usize>,
}

impl Graph {
    /// Builds a graph from 0-based edges. Each pair is normalized to `u < v`;
    /// input order is kept.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (idx, (a, b)) in edges.into_iter().enumerate() {
            let line = idx + 1;
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a + 1 });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v >= n {
                return Err(GraphError::LabelOutOfRange { vertex: v + 1, n });
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge { line, u: u + 1, v: v + 1 });
            }
            list.push((u, v));
        }
        Ok(Self::assemble(n, list))
    }

    fn assemble(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let degree = adjacency.iter().map(Vec::len).collect();
        Graph {
            n,
            edges,
            adjacency,
            degree,
        }
    }

    /// Parses the edge-list text format.
    ///
    /// One edge per line as two whitespace-separated positive labels. Lines
    /// starting with `#` and blank lines are ignored. An optional `n=<int>`
    /// line declares the vertex count, which allows isolated vertices past the
    /// largest label used by an edge.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut declared: Option<usize> = None;
        let mut max_label = 0usize;
        let mut seen = HashSet::new();
        let mut edges = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("n=") {
                if declared.is_some() {
                    return Err(GraphError::Parse {
                        line,
                        msg: "vertex count declared twice".into(),
                    });
                }
                let n = parse_label(rest.trim(), line)?;
                declared = Some(n);
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            match tokens.len() {
                2 => {}
                3 => {
                    return Err(GraphError::Parse {
                        line,
                        msg: "weighted edges are not supported".into(),
                    })
                }
                k => {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("expected two vertex labels, found {k} tokens"),
                    })
                }
            }
            let a = parse_label(tokens[0], line)?;
            let b = parse_label(tokens[1], line)?;
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            max_label = max_label.max(v);
            edges.push((u - 1, v - 1));
        }

        let n = match declared {
            Some(n) if n < max_label => {
                return Err(GraphError::LabelOutOfRange {
                    vertex: max_label,
                    n,
                })
            }
            Some(n) => n,
            None => max_label,
        };
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(Self::assemble(n, edges))
    }

    /// Serializes to the edge-list format, always including the `n=` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for &(u, v) in &self.edges {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as 0-based `(u, v)` with `u < v`, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }
}

fn parse_label(token: &str, line: usize) -> Result<usize, GraphError> {
    match token.parse::<usize>() {
        Ok(0) => Err(GraphError::Parse {
            line,
            msg: "vertex labels are 1-based; found 0".into(),
        }),
        Ok(v) => Ok(v),
        Err(_) => Err(GraphError::Parse {
            line,
            msg: format!("expected a positive integer, found {token:?}"),
        }),
    }
}
