//! Complete (transitive) precedence matrix and precedence repair of task
//! sequences.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrecedenceError {
    #[error("precedence relation is cyclic (task {0} would precede itself)")]
    CyclicPrecedence(usize),
    #[error("edge ({0}, {1}) references a task outside 1..={2}")]
    EdgeOutOfRange(usize, usize, usize),
}

/// Transitive precedence relation over tasks `1..=n` plus per-task
/// predecessor counts.
///
/// `precedes(i, j)` is true iff `i` must run before `j`, directly or
/// through intermediate tasks. The counts correspond to the extra row
/// the repair procedure consumes.
#[derive(Debug, Clone)]
pub struct CompletePrecedenceMatrix {
    n: usize,
    reach: Vec<bool>,
    pred_counts: Vec<u32>,
}

impl CompletePrecedenceMatrix {
    pub fn task_count(&self) -> usize {
        self.n
    }

    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.reach[(i - 1) * self.n + (j - 1)]
    }

    /// Number of (direct or indirect) predecessors of task `j`.
    pub fn predecessor_count(&self, j: usize) -> u32 {
        self.pred_counts[j - 1]
    }

    pub fn predecessor_counts(&self) -> &[u32] {
        &self.pred_counts
    }
}

/// Builds the complete precedence matrix as the transitive closure of
/// the direct edges, with a cycle check.
pub fn build_complete_matrix(
    edges: &[(usize, usize)],
    n: usize,
) -> Result<CompletePrecedenceMatrix, PrecedenceError> {
    let mut reach = vec![false; n * n];
    for &(a, b) in edges {
        if a == 0 || b == 0 || a > n || b > n {
            return Err(PrecedenceError::EdgeOutOfRange(a, b, n));
        }
        reach[(a - 1) * n + (b - 1)] = true;
    }
    // Floyd-Warshall style boolean closure.
    for k in 0..n {
        for i in 0..n {
            if reach[i * n + k] {
                for j in 0..n {
                    if reach[k * n + j] {
                        reach[i * n + j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        if reach[i * n + i] {
            return Err(PrecedenceError::CyclicPrecedence(i + 1));
        }
    }
    let pred_counts = (0..n)
        .map(|j| (0..n).filter(|&i| reach[i * n + j]).count() as u32)
        .collect();
    Ok(CompletePrecedenceMatrix {
        n,
        reach,
        pred_counts,
    })
}

/// Repairs a task sequence so it becomes a topological order of the
/// precedence relation.
///
/// The input is scanned cyclically; a task is emitted as soon as its
/// remaining predecessor count (on a working copy of the counts) drops
/// to zero, and its successors' counts are decremented. The output is a
/// pure function of the input: among simultaneously-ready tasks the one
/// met first in the cyclic scan wins.
pub fn correct_sequence(seq: &[usize], matrix: &CompletePrecedenceMatrix) -> Vec<usize> {
    let n = matrix.n;
    debug_assert_eq!(seq.len(), n);
    let mut counts = matrix.pred_counts.clone();
    let mut emitted = vec![false; n + 1];
    let mut out = Vec::with_capacity(n);
    let mut cursor = 0;
    while out.len() < n {
        let task = seq[cursor];
        if !emitted[task] && counts[task - 1] == 0 {
            emitted[task] = true;
            out.push(task);
            for k in 1..=n {
                if matrix.precedes(task, k) {
                    counts[k - 1] -= 1;
                }
            }
        }
        cursor += 1;
        if cursor == n {
            cursor = 0;
        }
    }
    out
}
