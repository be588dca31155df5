//! MacKay alist text format.
//!
//! ```text
//! n_cols n_rows
//! max_col_weight max_row_weight
//! <column weights>
//! <row weights>
//! <one line per column: 1-based row indices, zero padded>
//! <one line per row: 1-based column indices, zero padded>
//! ```

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::ldpc::sparse::ParityCheck;

pub fn to_alist(h: &ParityCheck) -> String {
    let max_col = h.cols().iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.rows().iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(out, "{} {}", h.n_cols(), h.n_rows()).unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    writeln!(out, "{}", join(&mut h.cols().iter().map(Vec::len))).unwrap();
    writeln!(out, "{}", join(&mut h.rows().iter().map(Vec::len))).unwrap();
    for col in h.cols() {
        let padded = col.iter().map(|r| r + 1).chain(std::iter::repeat(0)).take(max_col);
        writeln!(out, "{}", join(&mut padded.into_iter())).unwrap();
    }
    for row in h.rows() {
        let padded = row.iter().map(|c| c + 1).chain(std::iter::repeat(0)).take(max_row);
        writeln!(out, "{}", join(&mut padded.into_iter())).unwrap();
    }
    out
}

pub fn from_alist(text: &str) -> Result<ParityCheck> {
    let mut tokens = text.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|_| Error::Alist(format!("not a non-negative integer: {t:?}")))
    });
    let mut next = || tokens.next().unwrap_or_else(|| Err(Error::Alist("unexpected end of file".into())));
    let n_cols = next()?;
    let n_rows = next()?;
    let max_col = next()?;
    let max_row = next()?;
    let col_weights = (0..n_cols).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let row_weights = (0..n_rows).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let mut read_lists = |count: usize, width: usize, weights: &[usize], bound: usize| -> Result<Vec<Vec<usize>>> {
        (0..count)
            .map(|i| {
                let mut list = Vec::with_capacity(weights[i]);
                for j in 0..width {
                    let v = next()?;
                    if j < weights[i] {
                        if v == 0 || v > bound {
                            return Err(Error::Alist(format!("index {v} out of range")));
                        }
                        list.push(v - 1);
                    } else if v != 0 {
                        return Err(Error::Alist("non-zero padding entry".into()));
                    }
                }
                Ok(list)
            })
            .collect()
    };
    if col_weights.iter().any(|&w| w > max_col) || row_weights.iter().any(|&w| w > max_row) {
        return Err(Error::Alist("weight exceeds declared maximum".into()));
    }
    let cols = read_lists(n_cols, max_col, &col_weights, n_rows)?;
    let rows = read_lists(n_rows, max_row, &row_weights, n_cols)?;
    let h = ParityCheck::from_rows(n_cols, rows).map_err(|e| Error::Alist(e.to_string()))?;
    for (c, listed) in cols.iter().enumerate() {
        let mut listed = listed.clone();
        listed.sort_unstable();
        if listed != h.col(c) {
            return Err(Error::Alist(format!("column {} disagrees with row section", c + 1)));
        }
    }
    Ok(h)
}
