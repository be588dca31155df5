//! Progressive edge growth construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ldpc::sparse::ParityCheck;

/// Builds an `n_rows x n_cols` parity-check matrix with constant column
/// weight by progressive edge growth. Each new edge of a column goes to a
/// check node as far as possible from that column in the current graph,
/// lowest degree first, with seeded random tie-breaking.
pub fn progressive_edge_growth(
    n_rows: usize,
    n_cols: usize,
    col_weight: usize,
    seed: u64,
) -> Result<ParityCheck> {
    if col_weight == 0 || col_weight > n_rows {
        return Err(Error::Construction(format!(
            "column weight {col_weight} incompatible with {n_rows} rows"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut row_adj: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
    let mut col_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(col_weight); n_cols];

    // BFS bookkeeping, reset by bumping the stamp.
    let mut row_seen = vec![0u32; n_rows];
    let mut col_seen = vec![0u32; n_cols];
    let mut stamp = 0u32;
    let mut frontier = Vec::new();
    let mut next = Vec::new();
    let mut candidates = Vec::new();

    for col in 0..n_cols {
        for k in 0..col_weight {
            candidates.clear();
            if k == 0 {
                candidates.extend(0..n_rows);
            } else {
                stamp += 1;
                col_seen[col] = stamp;
                frontier.clear();
                for &r in &col_adj[col] {
                    row_seen[r] = stamp;
                    frontier.push(r);
                }
                let mut reached = frontier.len();
                loop {
                    next.clear();
                    for &r in &frontier {
                        for &c in &row_adj[r] {
                            if col_seen[c] == stamp {
                                continue;
                            }
                            col_seen[c] = stamp;
                            for &r2 in &col_adj[c] {
                                if row_seen[r2] != stamp {
                                    row_seen[r2] = stamp;
                                    next.push(r2);
                                }
                            }
                        }
                    }
                    if next.is_empty() {
                        // Expansion stalled: pick among unreachable rows.
                        candidates.extend((0..n_rows).filter(|&r| row_seen[r] != stamp));
                        break;
                    }
                    if reached + next.len() == n_rows {
                        // Everything reachable at this depth: pick among the
                        // rows that were farthest away.
                        candidates.extend_from_slice(&next);
                        break;
                    }
                    reached += next.len();
                    std::mem::swap(&mut frontier, &mut next);
                }
            }
            let min_deg = candidates.iter().map(|&r| row_adj[r].len()).min().ok_or_else(|| {
                Error::Construction(format!("no check node available for column {col}"))
            })?;
            candidates.retain(|&r| row_adj[r].len() == min_deg);
            let r = candidates[rng.random_range(0..candidates.len())];
            row_adj[r].push(col);
            col_adj[col].push(r);
        }
    }
    ParityCheck::from_rows(n_cols, row_adj)
}
