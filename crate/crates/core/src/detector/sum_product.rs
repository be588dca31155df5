//! Forward/backward sum-product on the aggressor-state chain.
//!
//! The state of victim `i` is `(a[i-1], a[i], a[i+1])`. Consecutive states
//! overlap in two components, so a transition only introduces the next
//! aggressor level. That makes each recursion step `O(q^3)`; the per-cell
//! likelihood table (`q^4` entries) dominates the cost.

use crate::channel::DeviceParams;
use crate::detector::observation::{Observations, WeightedLikelihoods};
use crate::detector::{Pmf, PosteriorPmf, PriorPmf};
use crate::error::{Error, Result};
use crate::math::exp_rel;

/// Exact per-cell posteriors under the finite-state Markov channel model.
///
/// Aggressor levels are i.u.d. except for the virtual erased cells just
/// outside the word-line, which pin the first state's upper-left and the last
/// state's upper-right component to level 0. Messages are kept in the log
/// domain and rescaled to a zero maximum after every step, so reads far in
/// the tails cannot underflow them.
pub fn sum_product_detect(
    params: &DeviceParams,
    obs: &Observations<'_>,
    priors: &[PriorPmf],
) -> Result<Vec<PosteriorPmf>> {
    let w = WeightedLikelihoods::build(params, obs, priors)?;
    let n = obs.len();
    let q = w.q;
    let ns = w.states;
    let q2 = q * q;

    // Log prior of aggressor position `j` (may be -1 or n for the padding cells).
    let uniform = vec![-(q as f64).ln(); q];
    let mut erased = vec![f64::NEG_INFINITY; q];
    erased[0] = 0.0;
    let aggressor_prior = |j: isize| -> &[f64] {
        if j < 0 || j >= n as isize {
            &erased
        } else {
            &uniform
        }
    };

    // Channel evidence per state (log-sum over the victim level) and the
    // victim PMF given each state, kept for the marginals.
    let mut evidence = vec![0.0; n * ns];
    let mut given_state = vec![0.0; n * q * ns];
    for (i, (e, r)) in evidence
        .chunks_exact_mut(ns)
        .zip(given_state.chunks_exact_mut(q * ns))
        .enumerate()
    {
        let cell = w.cell(i);
        for (s, es) in e.iter_mut().enumerate() {
            let max = (0..q).map(|x| cell[x * ns + s]).fold(f64::NEG_INFINITY, f64::max);
            if max == f64::NEG_INFINITY {
                *es = max;
                continue;
            }
            let mut sum = 0.0;
            for x in 0..q {
                let v = exp_rel(cell[x * ns + s] - max);
                r[x * ns + s] = v;
                sum += v;
            }
            for x in 0..q {
                r[x * ns + s] /= sum;
            }
            *es = max + sum.ln();
        }
    }

    // Forward: alpha[i] is the message from the transition factor into S_i.
    let mut alpha = vec![0.0; n * ns];
    {
        let (p1, p2, p3) = (aggressor_prior(-1), aggressor_prior(0), aggressor_prior(1));
        for s in 0..ns {
            alpha[s] = p1[s / q2] + p2[(s / q) % q] + p3[s % q];
        }
    }
    let mut pair = vec![0.0; q2];
    for i in 0..n - 1 {
        let (done, rest) = alpha.split_at_mut((i + 1) * ns);
        let cur = &done[i * ns..];
        let e = &evidence[i * ns..(i + 1) * ns];
        // The oldest component of S_i leaves the chain.
        for (ab, m) in pair.iter_mut().enumerate() {
            *m = lse((0..q).map(|t| {
                let s = t * q2 + ab;
                cur[s] + e[s]
            }));
        }
        let incoming = aggressor_prior(i as isize + 2);
        let next = &mut rest[..ns];
        for (ab, &m) in pair.iter().enumerate() {
            for c in 0..q {
                next[ab * q + c] = m + incoming[c];
            }
        }
        rescale(next, i + 1)?;
    }

    // Backward: beta[i] is the message from the transition factor g_{i+1}
    // into S_i; the last state has no successor.
    let mut beta = vec![0.0; n * ns];
    for i in (0..n - 1).rev() {
        let (head, tail) = beta.split_at_mut((i + 1) * ns);
        let next = &tail[..ns];
        let e = &evidence[(i + 1) * ns..(i + 2) * ns];
        let incoming = aggressor_prior(i as isize + 2);
        for (ab, m) in pair.iter_mut().enumerate() {
            *m = lse((0..q).map(|c| e[ab * q + c] + next[ab * q + c] + incoming[c]));
        }
        let cur = &mut head[i * ns..];
        for s in 0..ns {
            cur[s] = pair[s % q2];
        }
        rescale(cur, i)?;
    }

    // Marginals: state beliefs from both directions and the local evidence,
    // then the victim PMF given each state.
    let mut out = Vec::with_capacity(n);
    let mut belief = vec![0.0; ns];
    for i in 0..n {
        let (a, b) = (&alpha[i * ns..(i + 1) * ns], &beta[i * ns..(i + 1) * ns]);
        let e = &evidence[i * ns..(i + 1) * ns];
        for s in 0..ns {
            belief[s] = a[s] + b[s] + e[s];
        }
        let max = belief.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::Underflow { cell: i });
        }
        belief.iter_mut().for_each(|v| *v = exp_rel(*v - max));
        let r = &given_state[i * q * ns..(i + 1) * q * ns];
        let post: Vec<f64> = r
            .chunks_exact(ns)
            .map(|row| row.iter().zip(&belief).map(|(p, m)| p * m).sum())
            .collect();
        out.push(Pmf::from_weights(post).map_err(|_| Error::Underflow { cell: i })?);
    }
    Ok(out)
}

/// `ln sum exp` that tolerates all-`-inf` input (returns `-inf`).
fn lse(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = v.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.map(|x| exp_rel(x - max)).sum::<f64>().ln()
}

/// Shifts a log message so its largest entry is zero.
fn rescale(m: &mut [f64], cell: usize) -> Result<()> {
    let max = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Underflow { cell });
    }
    m.iter_mut().for_each(|v| *v -= max);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::AggressorState;
    use crate::detector::{brute_force_posteriors, cell_by_cell_detect, uniform_priors};
    use crate::quantizer::ScalarQuantizer;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_abs_diff(a: &[Pmf], b: &[Pmf]) -> f64 {
        a.iter()
            .zip(b)
            .flat_map(|(p, r)| p.iter().zip(r.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    fn random_instance(rng: &mut ChaCha8Rng, q: usize, n: usize) -> (DeviceParams, Vec<f64>, Vec<Pmf>) {
        let mut v = vec![rng.random_range(0.5..1.5)];
        for _ in 1..q {
            v.push(v.last().unwrap() + rng.random_range(0.3..1.5));
        }
        let sd = (0..q).map(|_| rng.random_range(0.05..0.4)).collect();
        let gv = rng.random_range(0.0..0.2);
        let p = DeviceParams::new(v.clone(), sd, gv, gv * rng.random_range(0.0..0.8)).unwrap();
        let y = (0..n).map(|_| rng.random_range(v[0] - 0.5..v[q - 1] + 1.0)).collect();
        let priors = (0..n)
            .map(|_| Pmf::from_weights((0..q).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap())
            .collect();
        (p, y, priors)
    }

    #[test]
    fn single_cell_uses_pinned_states() {
        let p = DeviceParams::mlc(1.0, 0.12, 0.5).unwrap();
        let y = 3.05;
        let post = sum_product_detect(&p, &Observations::Voltages(&[y]), &uniform_priors(4, 1)).unwrap();
        let raw: Vec<f64> = (0..4)
            .map(|x| (0..4).map(|s2| p.conditional_likelihood(y, x, AggressorState::new(0, s2, 0))).sum())
            .collect();
        let z: f64 = raw.iter().sum();
        for x in 0..4 {
            assert_relative_eq!(post[0][x], raw[x] / z, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_cell_without_diagonal_coupling_is_cell_by_cell() {
        let p = DeviceParams::mlc(1.0, 0.12, 0.0).unwrap();
        let obs = [2.9];
        let a = sum_product_detect(&p, &Observations::Voltages(&obs), &uniform_priors(4, 1)).unwrap();
        let b = cell_by_cell_detect(&p, &Observations::Voltages(&obs), &uniform_priors(4, 1)).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn no_diagonal_coupling_matches_cell_by_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (p, y, priors) = random_instance(&mut rng, 4, 200);
            let p = DeviceParams::new(p.nominal_voltage().to_vec(), p.noise_std().to_vec(), p.gamma_v(), 0.0).unwrap();
            let obs = Observations::Voltages(&y);
            let a = sum_product_detect(&p, &obs, &priors).unwrap();
            let b = cell_by_cell_detect(&p, &obs, &priors).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn matches_brute_force_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2, 4] {
            for n in 1..=6 {
                let (p, y, priors) = random_instance(&mut rng, q, n);
                let obs = Observations::Voltages(&y);
                let a = sum_product_detect(&p, &obs, &priors).unwrap();
                let b = brute_force_posteriors(&p, &obs, &priors).unwrap();
                let d = max_abs_diff(&a, &b);
                assert!(d < 1e-9, "q={q} n={n} diff={d}");
            }
        }
    }

    #[test]
    fn quantized_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = DeviceParams::mlc(1.0, 0.126, 0.5).unwrap();
        let quant = ScalarQuantizer::new(vec![1.9, 2.5, 3.0, 3.1, 3.6, 4.2]).unwrap();
        for n in 1..=5 {
            let bins: Vec<usize> = (0..n).map(|_| rng.random_range(0..quant.regions())).collect();
            let obs = Observations::Quantized { quantizer: &quant, bins: &bins };
            let a = sum_product_detect(&p, &obs, &uniform_priors(4, n)).unwrap();
            let b = brute_force_posteriors(&p, &obs, &uniform_priors(4, n)).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn long_wordline_is_normalized_and_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = DeviceParams::mlc(1.0, 0.13, 0.5).unwrap();
        let y: Vec<f64> = (0..5000).map(|_| rng.random_range(0.0..6.0)).collect();
        let post = sum_product_detect(&p, &Observations::Voltages(&y), &uniform_priors(4, 5000)).unwrap();
        for pmf in post {
            assert!(pmf.iter().all(|v| v.is_finite()));
            assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (p, y, priors) = random_instance(&mut rng, 4, 50);
        let c = 7.25;
        let ys: Vec<f64> = y.iter().map(|v| v + c).collect();
        let a = sum_product_detect(&p, &Observations::Voltages(&y), &priors).unwrap();
        let b = sum_product_detect(&p.shifted(c), &Observations::Voltages(&ys), &priors).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn rejects_mismatched_priors() {
        let p = DeviceParams::mlc(1.0, 0.1, 0.25).unwrap();
        assert!(matches!(
            sum_product_detect(&p, &Observations::Voltages(&[1.0, 2.0]), &uniform_priors(4, 1)),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            sum_product_detect(&p, &Observations::Voltages(&[]), &[]),
            Err(Error::EmptyWordline)
        ));
    }
}
