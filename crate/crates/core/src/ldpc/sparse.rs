use std::collections::HashSet;

use crate::error::{Error, Result};

/// Sparse binary parity-check matrix stored as row and column adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheck {
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheck {
    /// Builds the matrix from per-row column indices. Duplicate entries and
    /// out-of-range indices are rejected.
    pub fn from_rows(n_cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = vec![Vec::new(); n_cols];
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Construction(format!("row {r} has a repeated column")));
            }
            for &c in row.iter() {
                if c >= n_cols {
                    return Err(Error::Construction(format!("column {c} out of range in row {r}")));
                }
                cols[c].push(r);
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `H * bits == 0` over GF(2).
    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ (bits[c] & 1)) == 0)
    }

    /// True when no two columns share more than one row (no length-4 cycles,
    /// so the Tanner graph girth is at least 6).
    pub fn girth_at_least_6(&self) -> bool {
        let mut seen = HashSet::new();
        for col in &self.cols {
            for (i, &a) in col.iter().enumerate() {
                for &b in &col[i + 1..] {
                    if !seen.insert((a.min(b), a.max(b))) {
                        return false;
                    }
                }
            }
        }
        true
    }
}
