//! Per-cell posterior computation for a read word-line.

mod brute_force;
mod gray;
mod observation;
mod sum_product;

use std::ops::{Deref, Index};

use serde::{Deserialize, Serialize};

use crate::channel::DeviceParams;
use crate::error::{Error, Result};
use crate::math::exp_rel;

pub use brute_force::brute_force_posteriors;
pub use gray::{llrs_to_prior, posteriors_to_llrs, BitLlrs, GrayMap, LLR_CLAMP};
pub use observation::{quantized_conditional_likelihood, Observations};
pub use sum_product::sum_product_detect;

use observation::WeightedLikelihoods;

/// Probability mass function over the `q` levels of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf(Vec<f64>);

pub type PosteriorPmf = Pmf;
pub type PriorPmf = Pmf;

impl Pmf {
    pub fn uniform(q: usize) -> Self {
        Self(vec![1.0 / q as f64; q])
    }

    /// Normalizes non-negative weights. Fails if the weights are empty, have
    /// a negative or non-finite entry, or sum to zero.
    pub fn from_weights(mut w: Vec<f64>) -> Result<Self> {
        if w.is_empty() || w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParams("PMF weights must be finite and non-negative".into()));
        }
        let s = crate::math::normalize(&mut w);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParams("PMF weights sum to zero".into()));
        }
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Most probable level; ties go to the lowest level.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.0.iter().enumerate().skip(1) {
            if p > self.0[best] {
                best = k;
            }
        }
        best
    }
}

impl Deref for Pmf {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Pmf {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

pub fn uniform_priors(q: usize, n: usize) -> Vec<PriorPmf> {
    vec![Pmf::uniform(q); n]
}

/// Per-cell argmax decisions.
pub fn hard_decision(posteriors: &[PosteriorPmf]) -> Vec<usize> {
    posteriors.iter().map(Pmf::argmax).collect()
}

/// Benchmark detector: each cell's posterior from its own observation only,
/// using the aggressor-marginalized (Gaussian mixture) likelihood.
pub fn cell_by_cell_detect(
    params: &DeviceParams,
    obs: &Observations<'_>,
    priors: &[PriorPmf],
) -> Result<Vec<PosteriorPmf>> {
    let w = WeightedLikelihoods::build(params, obs, priors)?;
    (0..obs.len())
        .map(|i| {
            let cell = w.cell(i);
            let max = cell.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let post: Vec<f64> = cell
                .chunks_exact(w.states)
                .map(|row| row.iter().map(|l| exp_rel(l - max)).sum())
                .collect();
            Pmf::from_weights(post).map_err(|_| Error::ZeroLikelihood { cell: i })
        })
        .collect()
}

/// Detector selection for pipelines and configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    CellByCell,
    SumProduct,
}

impl DetectorKind {
    pub fn detect(
        self,
        params: &DeviceParams,
        obs: &Observations<'_>,
        priors: &[PriorPmf],
    ) -> Result<Vec<PosteriorPmf>> {
        match self {
            DetectorKind::CellByCell => cell_by_cell_detect(params, obs, priors),
            DetectorKind::SumProduct => sum_product_detect(params, obs, priors),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::CellByCell => "cell_by_cell",
            DetectorKind::SumProduct => "sum_product",
        }
    }
}

impl std::fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cell_by_cell" => Ok(DetectorKind::CellByCell),
            "sum_product" => Ok(DetectorKind::SumProduct),
            other => Err(Error::Config(format!("unknown detector {other:?}"))),
        }
    }
}
