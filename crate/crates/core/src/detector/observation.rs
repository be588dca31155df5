use crate::channel::{AggressorState, DeviceParams};
use crate::detector::Pmf;
use crate::error::{Error, Result};
use crate::math::normal_interval_prob;
use crate::quantizer::ScalarQuantizer;

const READ_LIMIT: f64 = 1e150;

/// What the detector sees of one word-line.
#[derive(Debug, Clone, Copy)]
pub enum Observations<'a> {
    /// Full-precision read voltages.
    Voltages(&'a [f64]),
    /// Region indices of a scalar read quantizer.
    Quantized {
        quantizer: &'a ScalarQuantizer,
        bins: &'a [usize],
    },
}

impl<'a> Observations<'a> {
    pub fn len(&self) -> usize {
        match self {
            Observations::Voltages(y) => y.len(),
            Observations::Quantized { bins, .. } => bins.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `log p(obs_i | x, s)` evaluated straight from the device parameters.
    pub(crate) fn log_likelihood(
        &self,
        params: &DeviceParams,
        cell: usize,
        x: usize,
        s: AggressorState,
    ) -> f64 {
        match *self {
            Observations::Voltages(y) => params.conditional_log_likelihood(y[cell], x, s),
            Observations::Quantized { quantizer, bins } => {
                quantized_conditional_likelihood(params, quantizer, bins[cell], x, s).ln()
            }
        }
    }
}

/// Probability that a cell with level `x` in state `s` is read into region
/// `bin` of `quantizer`.
pub fn quantized_conditional_likelihood(
    params: &DeviceParams,
    quantizer: &ScalarQuantizer,
    bin: usize,
    x: usize,
    s: AggressorState,
) -> f64 {
    let (lo, hi) = quantizer.region(bin);
    normal_interval_prob(lo, hi, params.state_mean(x, s), params.state_var(x, s))
}

/// Prior-weighted log likelihoods `ln prior_i(x) + ln p(obs_i | x, s)` for
/// every cell, laid out `[cell][x][state]`.
pub(crate) struct WeightedLikelihoods {
    pub q: usize,
    pub states: usize,
    pub logs: Vec<f64>,
}

impl WeightedLikelihoods {
    pub fn build(params: &DeviceParams, obs: &Observations<'_>, priors: &[Pmf]) -> Result<Self> {
        let n = obs.len();
        if n == 0 {
            return Err(Error::EmptyWordline);
        }
        if priors.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: priors.len(),
            });
        }
        let q = params.q();
        if let Some(p) = priors.iter().find(|p| p.len() != q) {
            return Err(Error::LengthMismatch {
                expected: q,
                actual: p.len(),
            });
        }
        let states = params.state_count();
        let block = q * states;
        let table = params.state_table();
        let log_norm: Vec<f64> = table
            .var
            .iter()
            .map(|v| -0.5 * (2.0 * std::f64::consts::PI * v).ln())
            .collect();
        let neg_half_inv_var: Vec<f64> = table.var.iter().map(|v| -0.5 / v).collect();

        // Quantized reads only take a handful of values; tabulate them once.
        let bin_logs: Option<Vec<f64>> = match obs {
            Observations::Quantized { quantizer, bins } => {
                if let Some(&b) = bins.iter().find(|&&b| b >= quantizer.regions()) {
                    return Err(Error::InvalidQuantizer(format!(
                        "bin {b} out of range for {} regions",
                        quantizer.regions()
                    )));
                }
                let mut t = Vec::with_capacity(quantizer.regions() * block);
                for bin in 0..quantizer.regions() {
                    let (lo, hi) = quantizer.region(bin);
                    for k in 0..block {
                        t.push(normal_interval_prob(lo, hi, table.mean[k], table.var[k]).ln());
                    }
                }
                Some(t)
            }
            Observations::Voltages(_) => None,
        };

        let mut logs = vec![0.0; n * block];
        for (cell, out) in logs.chunks_exact_mut(block).enumerate() {
            match (obs, &bin_logs) {
                (Observations::Voltages(y), _) => {
                    // Keeps (y - mean)^2 finite for any finite read.
                    let yi = y[cell].clamp(-READ_LIMIT, READ_LIMIT);
                    for k in 0..block {
                        let d = yi - table.mean[k];
                        out[k] = d * d * neg_half_inv_var[k] + log_norm[k];
                    }
                }
                (Observations::Quantized { bins, .. }, Some(t)) => {
                    let b = bins[cell];
                    out.copy_from_slice(&t[b * block..(b + 1) * block]);
                }
                _ => unreachable!(),
            }
            let mut any = false;
            for (x, row) in out.chunks_exact_mut(states).enumerate() {
                let lp = priors[cell][x].ln();
                for v in row.iter_mut() {
                    *v += lp;
                    any |= *v > f64::NEG_INFINITY;
                }
            }
            if !any {
                return Err(Error::ZeroLikelihood { cell });
            }
        }
        Ok(Self { q, states, logs })
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        let block = self.q * self.states;
        &self.logs[i * block..(i + 1) * block]
    }
}
