//! Systematic encoding from a reduced row-echelon form of H over GF(2).

use crate::ldpc::sparse::ParityCheck;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SystematicEncoder {
    n: usize,
    words: usize,
    /// Reduced rows, one per pivot, packed 64 columns per word.
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    info_positions: Vec<usize>,
}

impl SystematicEncoder {
    /// Gauss-Jordan elimination of `h`. Pivots are searched from the last
    /// column backwards, so parity bits sit towards the end of the codeword.
    /// Linearly dependent rows of `h` are dropped.
    pub fn new(h: &ParityCheck) -> Self {
        let n = h.n_cols();
        let words = n.div_ceil(64);
        let mut rows: Vec<Vec<u64>> = h
            .rows()
            .iter()
            .map(|row| {
                let mut bits = vec![0u64; words];
                for &c in row {
                    bits[c / 64] ^= 1 << (c % 64);
                }
                bits
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in (0..n).rev() {
            if rank == rows.len() {
                break;
            }
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & b != 0 {
                    row.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x ^= y);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        let mut is_pivot = vec![false; n];
        pivots.iter().for_each(|&c| is_pivot[c] = true);
        let info_positions = (0..n).filter(|&c| !is_pivot[c]).collect();
        Self {
            n,
            words,
            rows,
            pivots,
            info_positions,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Places `info` at the information positions and solves for the pivots.
    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        debug_assert_eq!(info.len(), self.info_positions.len());
        let mut packed = vec![0u64; self.words];
        for (&pos, &bit) in self.info_positions.iter().zip(info) {
            if bit & 1 == 1 {
                packed[pos / 64] |= 1 << (pos % 64);
            }
        }
        let mut codeword = vec![0u8; self.n];
        for (&pos, &bit) in self.info_positions.iter().zip(info) {
            codeword[pos] = bit & 1;
        }
        // Each reduced row has exactly one pivot column, so its parity over
        // the information positions is that pivot's value.
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            let ones: u32 = row.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
            codeword[pivot] = (ones & 1) as u8;
        }
        codeword
    }
}
