//! Monte Carlo BER experiments.
//!
//! A trial writes one word-line: random information bits are encoded, mapped
//! to levels through the Gray map (bit `2i` is the LSB of cell `i`, bit
//! `2i + 1` its MSB), disturbed by random aggressors, optionally quantized,
//! detected and decoded. Each trial draws from its own ChaCha stream derived
//! from the master seed, the operating point and the trial index, so results
//! do not depend on scheduling.

mod config;
mod plot;
mod records;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{simulate_wordline, DeviceParams};
use crate::detector::{
    hard_decision, llrs_to_prior, posteriors_to_llrs, uniform_priors, BitLlrs, DetectorKind, GrayMap, Observations,
    LLR_CLAMP,
};
use crate::error::{Error, Result};
use crate::ldpc::{CheckRule, LdpcCode};
use crate::quantizer::{PageQuantizers, QuantizerBook, ScalarQuantizer};

pub use config::{CodeSource, DeviceTemplate, SimConfig, StopRule, Sweep};
pub use plot::{emit_plot, render_svg};
pub use records::{read_csv, write_csv, BerRecord, CSV_SCHEMA};

/// Word-line length of detector-only runs: the standard code's 9216 bits at
/// two bits per cell.
pub const WORDLINE_CELLS: usize = 4608;

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub gamma_v: f64,
    pub alpha: f64,
    pub beta: f64,
    pub detector: DetectorKind,
    pub quantized: bool,
    pub max_in: usize,
    pub max_out: usize,
}

/// Everything a trial needs, prepared once per operating point.
#[derive(Debug, Clone)]
pub struct TrialSetup<'a> {
    pub point: OperatingPoint,
    pub params: DeviceParams,
    pub gray: GrayMap,
    /// `None` runs the detector alone on random level sequences.
    pub code: Option<&'a LdpcCode>,
    /// Joint read quantizer when the pipeline is quantized.
    pub quantizer: Option<ScalarQuantizer>,
    pub cells: usize,
    pub check_rule: CheckRule,
}

impl<'a> TrialSetup<'a> {
    /// Unquantized setup on the MLC Gray map.
    pub fn new(point: OperatingPoint, params: DeviceParams, code: Option<&'a LdpcCode>, cells: usize) -> Result<Self> {
        let gray = GrayMap::mlc();
        if gray.q() != params.q() {
            return Err(Error::InvalidParams("Gray map and device disagree on q".into()));
        }
        let cells = match code {
            Some(c) => {
                if c.n() % gray.bits_per_cell() != 0 {
                    return Err(Error::InvalidParams(format!(
                        "code length {} is not a multiple of {} bits per cell",
                        c.n(),
                        gray.bits_per_cell()
                    )));
                }
                c.n() / gray.bits_per_cell()
            }
            None => cells,
        };
        if cells == 0 {
            return Err(Error::EmptyWordline);
        }
        Ok(Self {
            point,
            params,
            gray,
            code,
            quantizer: None,
            cells,
            check_rule: CheckRule::SumProduct,
        })
    }

    pub fn with_quantizers(mut self, q: &PageQuantizers) -> Self {
        self.quantizer = Some(q.joint());
        self.point.quantized = true;
        self
    }

    pub fn with_check_rule(mut self, rule: CheckRule) -> Self {
        self.check_rule = rule;
        self
    }
}

/// Error counts of one or more trials. Addition is commutative, so batches
/// can be reduced in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialCounts {
    pub trials: u64,
    /// Raw bit errors of the first detection pass, over all stored bits.
    pub uncoded_bit_errors: u64,
    pub uncoded_bits: u64,
    /// Information-bit errors after the final decode.
    pub coded_bit_errors: u64,
    pub info_bits: u64,
    pub uncoded_wl_errors: u64,
    pub coded_wl_errors: u64,
    /// Outer detection/decoding rounds actually used.
    pub outer_rounds: u64,
}

impl std::ops::AddAssign for TrialCounts {
    fn add_assign(&mut self, o: Self) {
        self.trials += o.trials;
        self.uncoded_bit_errors += o.uncoded_bit_errors;
        self.uncoded_bits += o.uncoded_bits;
        self.coded_bit_errors += o.coded_bit_errors;
        self.info_bits += o.info_bits;
        self.uncoded_wl_errors += o.uncoded_wl_errors;
        self.coded_wl_errors += o.coded_wl_errors;
        self.outer_rounds += o.outer_rounds;
    }
}

impl TrialCounts {
    pub fn uncoded_ber(&self) -> f64 {
        ratio(self.uncoded_bit_errors, self.uncoded_bits)
    }

    /// NaN when nothing was decoded.
    pub fn coded_ber(&self) -> f64 {
        ratio(self.coded_bit_errors, self.info_bits)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        f64::NAN
    } else {
        a as f64 / b as f64
    }
}

/// Runs one word-line through the full pipeline.
pub fn run_trial<R: Rng + ?Sized>(setup: &TrialSetup<'_>, rng: &mut R) -> Result<TrialCounts> {
    let gray = &setup.gray;
    let n = setup.cells;
    let (info, stored) = match setup.code {
        Some(code) => {
            let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
            let cw = code.encode(&info)?;
            (info, cw)
        }
        None => {
            let bits = (0..n * gray.bits_per_cell()).map(|_| rng.random_range(0..2u8)).collect();
            (Vec::new(), bits)
        }
    };
    let victims = gray.bits_to_levels(&stored);
    let aggressors: Vec<usize> = (0..n).map(|_| rng.random_range(0..setup.params.q())).collect();
    let read = simulate_wordline(&setup.params, &victims, &aggressors, rng)?;

    let bins;
    let obs = match &setup.quantizer {
        Some(quantizer) => {
            bins = quantizer.quantize_all(&read.y);
            Observations::Quantized {
                quantizer,
                bins: &bins,
            }
        }
        None => Observations::Voltages(&read.y),
    };
    let detector = setup.point.detector;
    let posts = detector.detect(&setup.params, &obs, &uniform_priors(setup.params.q(), n))?;
    let raw_bits = gray.levels_to_bits(&hard_decision(&posts));
    let uncoded_bit_errors = count_diff(&raw_bits, &stored);

    let mut counts = TrialCounts {
        trials: 1,
        uncoded_bit_errors,
        uncoded_bits: stored.len() as u64,
        uncoded_wl_errors: u64::from(uncoded_bit_errors > 0),
        outer_rounds: 1,
        ..TrialCounts::default()
    };
    let Some(code) = setup.code else {
        return Ok(counts);
    };

    let mut det_llrs = posteriors_to_llrs(&posts, gray).llrs;
    let mut result = code.decode_with(&det_llrs, setup.point.max_in, setup.check_rule)?;
    let mut rounds = 1;
    while rounds < setup.point.max_out && !result.syndrome_ok {
        rounds += 1;
        // Decoder extrinsic becomes the detector prior; the detector passes
        // back only what it adds on top of that prior.
        let prior_llrs: Vec<f64> = result.extrinsic.iter().map(|l| l.clamp(-LLR_CLAMP, LLR_CLAMP)).collect();
        let priors = llrs_to_prior(
            &BitLlrs {
                bits_per_cell: gray.bits_per_cell(),
                llrs: prior_llrs.clone(),
            },
            gray,
        );
        let posts = detector.detect(&setup.params, &obs, &priors)?;
        det_llrs = posteriors_to_llrs(&posts, gray).llrs;
        for (d, p) in det_llrs.iter_mut().zip(&prior_llrs) {
            *d = (*d - p).clamp(-LLR_CLAMP, LLR_CLAMP);
        }
        result = code.decode_with(&det_llrs, setup.point.max_in, setup.check_rule)?;
    }
    let decoded = code.extract_info(&result.hard_bits);
    let coded_bit_errors = count_diff(&decoded, &info);
    counts.coded_bit_errors = coded_bit_errors;
    counts.info_bits = info.len() as u64;
    counts.coded_wl_errors = u64::from(coded_bit_errors > 0);
    counts.outer_rounds = rounds as u64;
    Ok(counts)
}

fn count_diff(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Seed of the trial stream family of an operating point. Detector and
/// scheme settings are deliberately excluded so that competing pipelines at
/// the same channel point see the same word-lines.
pub fn point_seed(master: u64, gamma_v: f64, alpha: f64, beta: f64) -> u64 {
    let mut h = splitmix(master);
    for v in [gamma_v, alpha, beta] {
        h = splitmix(h ^ v.to_bits());
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG of trial `index` within the stream family `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Outcome of [`run_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOutcome {
    pub counts: TrialCounts,
    /// Stop rule ended on the trial cap before enough word-line errors.
    pub censored: bool,
    pub seconds: f64,
}

impl PointOutcome {
    /// Word-line errors as seen by the stop rule.
    pub fn wl_errors(&self, coded: bool) -> u64 {
        if coded {
            self.counts.coded_wl_errors
        } else {
            self.counts.uncoded_wl_errors
        }
    }
}

/// Runs parallel batches of trials until the stop rule is met. Batch
/// boundaries are fixed, so the trial count is deterministic too.
pub fn run_point(setup: &TrialSetup<'_>, seed: u64, stop: &StopRule) -> Result<PointOutcome> {
    let start = Instant::now();
    let coded = setup.code.is_some();
    let mut total = TrialCounts::default();
    let wl_errors = |c: &TrialCounts| if coded { c.coded_wl_errors } else { c.uncoded_wl_errors };
    while total.trials < stop.max_trials && wl_errors(&total) < stop.min_wl_errors {
        let first = total.trials;
        let last = (first + stop.batch).min(stop.max_trials);
        let batch = (first..last)
            .into_par_iter()
            .map(|t| run_trial(setup, &mut trial_rng(seed, t)))
            .try_reduce(TrialCounts::default, |mut a, b| {
                a += b;
                Ok(a)
            })?;
        total += batch;
    }
    Ok(PointOutcome {
        counts: total,
        censored: wl_errors(&total) < stop.min_wl_errors,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every operating point of the configuration and writes the CSV.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let code = if cfg.coded { Some(cfg.code.load()?) } else { None };
    let book = match &cfg.quantizers {
        Some(p) => QuantizerBook::read(p)?,
        None => QuantizerBook::default(),
    };
    let cells = WORDLINE_CELLS;
    let mut records = Vec::new();
    for &alpha in &cfg.sweep.alpha {
        for &gamma_v in &cfg.sweep.gamma_v {
            let params = cfg.device.params(gamma_v, alpha)?;
            let quantizers = if cfg.quantized {
                let q = match book.find(gamma_v, alpha, cfg.device.beta) {
                    Some(q) => q,
                    None => PageQuantizers::design(&params, &GrayMap::mlc(), cfg.fine_bins)?,
                };
                Some(q)
            } else {
                None
            };
            let seed = point_seed(cfg.seed, gamma_v, alpha, cfg.device.beta);
            for &detector in &cfg.detectors {
                let point = OperatingPoint {
                    gamma_v,
                    alpha,
                    beta: cfg.device.beta,
                    detector,
                    quantized: cfg.quantized,
                    max_in: cfg.max_in,
                    max_out: cfg.max_out,
                };
                let mut setup = TrialSetup::new(point, params.clone(), code.as_ref(), cells)?
                    .with_check_rule(cfg.check_rule);
                if let Some(q) = &quantizers {
                    setup = setup.with_quantizers(q);
                }
                let out = run_point(&setup, seed, &cfg.stop)?;
                let mut rec = BerRecord::new(&point, &out, cfg.coded);
                if !cfg.timing {
                    rec.seconds = 0.0;
                }
                log::info!(
                    "gamma_v={gamma_v} alpha={alpha} {detector}: uncoded {:.3e} coded {:.3e} ({} wl errors / {} trials{})",
                    rec.uncoded_ber,
                    rec.coded_ber,
                    rec.wl_errors,
                    rec.trials,
                    if rec.censored { ", censored" } else { "" }
                );
                records.push(rec);
            }
        }
    }
    write_csv(&cfg.output, &records)?;
    Ok(records)
}
