//! Set partitions as restricted growth strings.

use crate::partition::Partition;

use super::SolveError;

/// Largest vertex count the enumerators accept; Bell(14) is about 1.9e8.
pub const MAX_ENUMERATION_N: usize = 14;

pub(crate) fn check_size(n: usize) -> Result<(), SolveError> {
    if n > MAX_ENUMERATION_N {
        return Err(SolveError::TooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

/// Every partition of `{0..n}` in lexicographic restricted-growth order,
/// optionally only those with exactly `m` blocks.
pub fn enumerate_partitions(n: usize, m: Option<usize>) -> Result<RestrictedGrowth, SolveError> {
    check_size(n)?;
    Ok(RestrictedGrowth::new(n, m))
}

#[derive(Debug, Clone)]
pub struct RestrictedGrowth {
    labels: Vec<usize>,
    /// `prefix_max[i]` is the largest label among `labels[..i]`.
    prefix_max: Vec<usize>,
    blocks: Option<usize>,
    done: bool,
}

impl RestrictedGrowth {
    fn new(n: usize, blocks: Option<usize>) -> Self {
        let infeasible = n == 0 || blocks.is_some_and(|m| m == 0 || m > n);
        let mut it = RestrictedGrowth {
            labels: vec![0; n],
            prefix_max: vec![0; n],
            blocks,
            done: infeasible,
        };
        if !it.done {
            if let Some(m) = blocks {
                // Smallest string with m blocks: 0 ... 0 1 2 .. m-1.
                for (i, slot) in it.labels.iter_mut().enumerate().skip(n - m + 1) {
                    *slot = i - (n - m);
                }
                it.refresh_prefix(1);
            }
        }
        it
    }

    fn refresh_prefix(&mut self, from: usize) {
        for i in from.max(1)..self.labels.len() {
            self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i - 1]);
        }
    }

    /// Advances to the next string in lexicographic order; false when done.
    fn advance(&mut self) -> bool {
        let n = self.labels.len();
        for i in (1..n).rev() {
            let cap = self.prefix_max[i] + 1;
            for value in self.labels[i] + 1..=cap {
                self.labels[i] = value;
                let used = self.prefix_max[i].max(value) + 1;
                let tail = n - i - 1;
                let need = match self.blocks {
                    None => 0,
                    // Raising the label further only adds blocks.
                    Some(m) if used > m => break,
                    Some(m) if used + tail < m => continue,
                    Some(m) => m - used,
                };
                // Smallest completion: zeros, then the missing blocks in order.
                for slot in &mut self.labels[i + 1..] {
                    *slot = 0;
                }
                for (k, slot) in self.labels[n - need..].iter_mut().enumerate() {
                    *slot = used + k;
                }
                self.refresh_prefix(i + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for RestrictedGrowth {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let current = Partition::from_labels(&self.labels).expect("n > 0");
        debug_assert!(self.blocks.is_none_or(|m| current.m() == m));
        if !self.advance() {
            self.done = true;
        }
        Some(current)
    }
}
