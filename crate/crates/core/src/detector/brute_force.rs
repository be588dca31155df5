use crate::channel::{AggressorState, DeviceParams};
use crate::detector::observation::Observations;
use crate::detector::{Pmf, PosteriorPmf, PriorPmf};
use crate::error::{Error, Result};
use crate::math::log_sum_exp;

/// Largest `q^(n+2)` accepted by [`brute_force_posteriors`].
pub const MAX_ENUMERATION: f64 = 1e7;

/// Exact marginals by exhaustive enumeration of every aggressor word-line.
///
/// Intended as a test oracle for small word-lines. Given the aggressor
/// levels, the victim cells are conditionally independent, so the sum over
/// victim inputs factorizes per cell and is done in closed form; the sum over
/// aggressor configurations is explicit. Likelihoods are evaluated directly
/// from the device parameters, without the detector's precomputed tables.
pub fn brute_force_posteriors(
    params: &DeviceParams,
    obs: &Observations<'_>,
    priors: &[PriorPmf],
) -> Result<Vec<PosteriorPmf>> {
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
    let configurations = (q as f64).powi(n as i32 + 2);
    if configurations > MAX_ENUMERATION {
        return Err(Error::InstanceTooLarge { configurations });
    }

    // acc[i][x] = log sum over aggressor configs of p(x_i = x, y, a).
    let mut acc = vec![vec![f64::NEG_INFINITY; q]; n];
    let mut local = vec![vec![0.0; q]; n];
    let mut local_total = vec![0.0; n];
    let mut aggressors = vec![0usize; n];
    let total = q.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for a in aggressors.iter_mut() {
            *a = c % q;
            c /= q;
        }
        let level = |j: isize| -> usize {
            if j < 0 || j >= n as isize {
                0
            } else {
                aggressors[j as usize]
            }
        };
        for i in 0..n {
            let s = AggressorState::new(level(i as isize - 1), level(i as isize), level(i as isize + 1));
            for x in 0..q {
                local[i][x] = priors[i][x].ln() + obs.log_likelihood(params, i, x, s);
            }
            local_total[i] = log_sum_exp(&local[i]);
        }
        let joint: f64 = local_total.iter().sum();
        if joint == f64::NEG_INFINITY {
            continue;
        }
        for i in 0..n {
            let others = joint - local_total[i];
            for x in 0..q {
                let v = others + local[i][x];
                acc[i][x] = log_add(acc[i][x], v);
            }
        }
    }

    acc.into_iter()
        .enumerate()
        .map(|(i, logs)| {
            let z = log_sum_exp(&logs);
            Pmf::from_weights(logs.iter().map(|l| (l - z).exp()).collect())
                .map_err(|_| Error::ZeroLikelihood { cell: i })
        })
        .collect()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}
