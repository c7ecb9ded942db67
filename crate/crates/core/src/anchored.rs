//! The n x n matrix of chain states built from n realizations, its
//! target-membership skeleton, and matching value vectors.

use crate::chain::Realization;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::matching::{PerfectMatching, Skeleton};

/// An n x n grid of chain states. Row i holds states `X_{i1} .. X_{in}` of
/// realization i (the initial state `X_{i0}` never enters the matrix).
/// Entries live in the independent sets of `ambient`; `target` defines the
/// membership set H for skeletons and H-matchings.
#[derive(Clone, Debug)]
pub struct AnchoredMatrix {
    n: usize,
    entries: Vec<VertexSet>, // row-major
    ambient: Graph,
    target: Graph,
}

impl AnchoredMatrix {
    /// Builds the matrix from exactly `n` realizations of length `n + 1`.
    pub fn build(ambient: Graph, target: Graph, realizations: &[Realization]) -> Result<Self> {
        let n = realizations.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("no realizations".into()));
        }
        if ambient.num_vertices() != target.num_vertices() {
            return Err(Error::InvalidMatrix("ambient/target vertex counts differ".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, r) in realizations.iter().enumerate() {
            if r.states.len() != n + 1 {
                return Err(Error::InvalidMatrix(format!(
                    "realization {i} has {} states, expected {}",
                    r.states.len(),
                    n + 1
                )));
            }
            for s in &r.states[1..] {
                if !ambient.is_independent(s)? {
                    return Err(Error::InvalidMatrix(format!(
                        "realization {i} contains a state not independent in the ambient graph"
                    )));
                }
                entries.push(*s);
            }
        }
        Ok(AnchoredMatrix { n, entries, ambient, target })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> &VertexSet {
        &self.entries[row * self.n + col]
    }

    pub fn ambient(&self) -> &Graph {
        &self.ambient
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    /// 0-1 matrix marking which entries are independent in the target graph.
    pub fn h_skeleton(&self) -> Skeleton {
        let mut rows = vec![0u128; self.n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..self.n {
                if self
                    .target
                    .is_independent(self.entry(i, j))
                    .expect("entry width matches target graph")
                {
                    *row |= 1 << j;
                }
            }
        }
        Skeleton::new(self.n, rows).expect("matrix is square")
    }

    /// Component k of the result is the entry at `(m.rows[k], k)`.
    pub fn value_vector(&self, m: &PerfectMatching) -> Result<Vec<VertexSet>> {
        if m.n() != self.n {
            return Err(Error::InvalidMatching(format!(
                "matching dimension {} does not fit matrix dimension {}",
                m.n(),
                self.n
            )));
        }
        Ok((0..self.n).map(|col| *self.entry(m.rows[col], col)).collect())
    }

    /// True iff `m` is a matching whose value vector lies entirely in the
    /// target graph's independent sets.
    pub fn is_h_pm(&self, m: &PerfectMatching) -> Result<bool> {
        let values = self.value_vector(m)?;
        for v in &values {
            if !self.target.is_independent(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Serializes the grid as rows of bit-pattern integers.
    pub fn format_entries(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(&self.entry(i, j).bits().to_string());
            }
            out.push('\n');
        }
        out
    }
}
