//! Partitions of a vertex set into non-empty, disjoint communities.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid JSON partition: {0}")]
    Json(String),
    #[error("vertex {vertex} exceeds graph size {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} listed twice")]
    Duplicate(usize),
    #[error("unassigned vertex {0}")]
    Unassigned(usize),
    #[error("partition covers {found} vertices, graph has {expected}")]
    SizeMismatch { found: usize, expected: usize },
    #[error("partition is empty")]
    Empty,
}

/// Maps arbitrary community labels onto `0..m` in order of first appearance.
pub fn canonicalize<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Vec<usize> {
    let mut remap = HashMap::new();
    labels
        .iter()
        .map(|label| {
            let next = remap.len();
            *remap.entry(*label).or_insert(next)
        })
        .collect()
}

/// A canonical partition: `assign[v]` is the 0-based community of vertex `v`,
/// communities are numbered by first appearance and none is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assign: Vec<usize>,
    m: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, relabeling them canonically.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Result<Self, PartitionError> {
        if labels.is_empty() {
            return Err(PartitionError::Empty);
        }
        let assign = canonicalize(labels);
        let m = assign.iter().max().map_or(0, |&c| c + 1);
        Ok(Partition { assign, m })
    }

    /// Builds a partition of `0..n` from explicit blocks of 0-based vertices.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut labels: Vec<Option<usize>> = vec![None; n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                let slot = labels
                    .get_mut(v)
                    .ok_or(PartitionError::VertexOutOfRange { vertex: v + 1, n })?;
                if slot.is_some() {
                    return Err(PartitionError::Duplicate(v + 1));
                }
                *slot = Some(b);
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(v, l)| l.ok_or(PartitionError::Unassigned(v + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_labels(&labels)
    }

    /// Like [`Partition::from_blocks`] with 1-based vertex labels.
    pub fn from_blocks_1based(n: usize, blocks: &[&[usize]]) -> Result<Self, PartitionError> {
        let shifted: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| b.iter().map(|&v| v.wrapping_sub(1)).collect())
            .collect();
        Self::from_blocks(n, &shifted)
    }

    /// Everything in one community.
    pub fn single(n: usize) -> Self {
        Partition {
            assign: vec![0; n],
            m: 1,
        }
    }

    /// Parses a partition for `g`: either `vertex community` lines or a JSON
    /// object mapping vertex labels to community labels. `#` comments are
    /// allowed in both forms.
    pub fn parse(text: &str, g: &Graph) -> Result<Self, PartitionError> {
        let body: String = text
            .lines()
            .map(|l| if l.trim_start().starts_with('#') { "" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let pairs = if body.trim_start().starts_with('{') {
            parse_json_pairs(&body)?
        } else {
            parse_line_pairs(&body)?
        };

        let n = g.n();
        let mut labels: Vec<Option<u64>> = vec![None; n];
        for (vertex, community) in pairs {
            if vertex == 0 || vertex > n {
                return Err(PartitionError::VertexOutOfRange { vertex, n });
            }
            let slot = &mut labels[vertex - 1];
            if slot.is_some() {
                return Err(PartitionError::Duplicate(vertex));
            }
            *slot = Some(community);
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(v, l)| l.ok_or(PartitionError::Unassigned(v + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_labels(&labels)
    }

    /// `vertex community` lines, both 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, &c) in self.assign.iter().enumerate() {
            writeln!(out, "{} {}", v + 1, c + 1).unwrap();
        }
        out
    }

    pub fn n(&self) -> usize {
        self.assign.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn community_of(&self, v: usize) -> usize {
        self.assign[v]
    }

    /// Members of each community, ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.m];
        for (v, &c) in self.assign.iter().enumerate() {
            blocks[c].push(v);
        }
        blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.m];
        for &c in &self.assign {
            sizes[c] += 1;
        }
        sizes
    }

    /// Checks that the partition covers exactly the vertices of `g`.
    pub fn check_graph(&self, g: &Graph) -> Result<(), PartitionError> {
        if self.n() != g.n() {
            return Err(PartitionError::SizeMismatch {
                found: self.n(),
                expected: g.n(),
            });
        }
        Ok(())
    }
}

fn parse_line_pairs(body: &str) -> Result<Vec<(usize, u64)>, PartitionError> {
    let mut pairs = Vec::new();
    for (idx, raw) in body.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(PartitionError::Parse {
                line,
                msg: format!("expected `vertex community`, found {} tokens", tokens.len()),
            });
        }
        let vertex = tokens[0].parse::<usize>().map_err(|_| PartitionError::Parse {
            line,
            msg: format!("bad vertex label {:?}", tokens[0]),
        })?;
        let community = tokens[1].parse::<u64>().map_err(|_| PartitionError::Parse {
            line,
            msg: format!("bad community label {:?}", tokens[1]),
        })?;
        pairs.push((vertex, community));
    }
    Ok(pairs)
}

fn parse_json_pairs(body: &str) -> Result<Vec<(usize, u64)>, PartitionError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| PartitionError::Json(e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| PartitionError::Json("expected an object".into()))?;
    object
        .iter()
        .map(|(key, val)| {
            let vertex = key
                .trim()
                .parse::<usize>()
                .map_err(|_| PartitionError::Json(format!("bad vertex label {key:?}")))?;
            let community = val
                .as_u64()
                .or_else(|| val.as_str().and_then(|s| s.trim().parse().ok()))
                .ok_or_else(|| PartitionError::Json(format!("bad community for vertex {key}")))?;
            Ok((vertex, community))
        })
        .collect()
}
