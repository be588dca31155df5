//! Level/bit labelling and conversions between symbol PMFs and bit LLRs.
//!
//! LLRs follow `log(P(bit = 0) / P(bit = 1))` everywhere in the crate.

use crate::detector::{Pmf, PosteriorPmf, PriorPmf};
use crate::error::{Error, Result};

/// Saturation magnitude for every LLR produced here.
pub const LLR_CLAMP: f64 = 30.0;

/// Bijection between cell levels and bit labels. Bit 0 of a label is the LSB
/// page, bit 1 the MSB page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayMap {
    bits_per_cell: usize,
    labels: Vec<u32>,
    levels: Vec<usize>,
}

impl GrayMap {
    /// Builds a map from per-level bit tuples, LSB first.
    pub fn new(bits: &[Vec<u8>]) -> Result<Self> {
        let q = bits.len();
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::InvalidParams(format!("gray map needs a power-of-two level count, got {q}")));
        }
        let b = q.trailing_zeros() as usize;
        let mut labels = Vec::with_capacity(q);
        for tuple in bits {
            if tuple.len() != b || tuple.iter().any(|&v| v > 1) {
                return Err(Error::InvalidParams(format!("label {tuple:?} is not {b} bits")));
            }
            labels.push(tuple.iter().enumerate().map(|(j, &v)| (v as u32) << j).sum());
        }
        let mut levels = vec![usize::MAX; q];
        for (x, &l) in labels.iter().enumerate() {
            if levels[l as usize] != usize::MAX {
                return Err(Error::InvalidParams("gray map is not a bijection".into()));
            }
            levels[l as usize] = x;
        }
        Ok(Self {
            bits_per_cell: b,
            labels,
            levels,
        })
    }

    /// MLC labelling `(lsb, msb)`: 0 -> (1,1), 1 -> (1,0), 2 -> (0,0), 3 -> (0,1).
    ///
    /// The LSB page changes once along the voltage axis and the MSB page
    /// twice, so one LSB read boundary and two MSB read boundaries separate
    /// the pages' bit values.
    pub fn mlc() -> Self {
        Self::new(&[vec![1, 1], vec![1, 0], vec![0, 0], vec![0, 1]]).expect("valid map")
    }

    /// Binary-reflected Gray code for any power-of-two `q`.
    pub fn reflected(q: usize) -> Result<Self> {
        let b = q.trailing_zeros() as usize;
        let bits: Vec<Vec<u8>> = (0..q)
            .map(|x| {
                let g = x ^ (x >> 1);
                (0..b).map(|j| ((g >> j) & 1) as u8).collect()
            })
            .collect();
        Self::new(&bits)
    }

    pub fn q(&self) -> usize {
        self.labels.len()
    }

    pub fn bits_per_cell(&self) -> usize {
        self.bits_per_cell
    }

    /// Value of page `bit` for `level`.
    pub fn bit(&self, level: usize, bit: usize) -> u8 {
        ((self.labels[level] >> bit) & 1) as u8
    }

    /// Level carrying the given page bits (LSB first).
    pub fn level(&self, bits: &[u8]) -> usize {
        let label: usize = bits.iter().enumerate().map(|(j, &v)| (v as usize & 1) << j).sum();
        self.levels[label]
    }

    /// Adjacent levels differ in exactly one bit.
    pub fn is_gray(&self) -> bool {
        self.labels.windows(2).all(|w| (w[0] ^ w[1]).count_ones() == 1)
    }

    /// Maps a bit sequence (cell `i` owns bits `i*b .. i*b + b`, LSB first)
    /// to cell levels.
    pub fn bits_to_levels(&self, bits: &[u8]) -> Vec<usize> {
        bits.chunks_exact(self.bits_per_cell).map(|c| self.level(c)).collect()
    }

    pub fn levels_to_bits(&self, levels: &[usize]) -> Vec<u8> {
        levels
            .iter()
            .flat_map(|&x| (0..self.bits_per_cell).map(move |j| self.bit(x, j)))
            .collect()
    }
}

/// Bit LLRs of a word-line laid out cell-major: entry `i * b + j` is page `j`
/// of cell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BitLlrs {
    pub bits_per_cell: usize,
    pub llrs: Vec<f64>,
}

impl BitLlrs {
    pub fn cells(&self) -> usize {
        self.llrs.len() / self.bits_per_cell
    }

    pub fn get(&self, cell: usize, bit: usize) -> f64 {
        self.llrs[cell * self.bits_per_cell + bit]
    }

    pub fn lsb(&self, cell: usize) -> f64 {
        self.get(cell, 0)
    }

    pub fn msb(&self, cell: usize) -> f64 {
        self.get(cell, 1)
    }
}

/// Marginal bit LLRs of each cell posterior, clamped to `±LLR_CLAMP`.
pub fn posteriors_to_llrs(posteriors: &[PosteriorPmf], gray: &GrayMap) -> BitLlrs {
    let b = gray.bits_per_cell();
    let mut llrs = Vec::with_capacity(posteriors.len() * b);
    for pmf in posteriors {
        for j in 0..b {
            let (mut p0, mut p1) = (0.0, 0.0);
            for (x, &p) in pmf.iter().enumerate() {
                if gray.bit(x, j) == 0 {
                    p0 += p;
                } else {
                    p1 += p;
                }
            }
            llrs.push((p0.ln() - p1.ln()).clamp(-LLR_CLAMP, LLR_CLAMP));
        }
    }
    BitLlrs {
        bits_per_cell: b,
        llrs,
    }
}

/// Per-cell symbol priors formed as the product of independent bit
/// probabilities given by the LLRs.
pub fn llrs_to_prior(llrs: &BitLlrs, gray: &GrayMap) -> Vec<PriorPmf> {
    let b = llrs.bits_per_cell;
    llrs.llrs
        .chunks_exact(b)
        .map(|cell| {
            // log P(bit = 0) = -ln(1 + e^-L), log P(bit = 1) = -ln(1 + e^L)
            let logs: Vec<f64> = (0..gray.q())
                .map(|x| {
                    (0..b)
                        .map(|j| {
                            let l = cell[j];
                            let t = if gray.bit(x, j) == 0 { -l } else { l };
                            -softplus(t)
                        })
                        .sum()
                })
                .collect();
            let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Pmf::from_weights(logs.iter().map(|l| (l - m).exp()).collect()).expect("finite LLRs")
        })
        .collect()
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}
