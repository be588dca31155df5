//! LDPC codes for word-line protection.

mod alist;
mod decoder;
mod encoder;
mod peg;
mod sparse;

use std::path::Path;

use crate::error::{Error, Result};

pub use alist::{from_alist, to_alist};
pub use decoder::{CheckRule, DecodeResult, DECODER_LLR_CLAMP};
pub use peg::progressive_edge_growth;
pub use sparse::ParityCheck;

use decoder::TannerGraph;
use encoder::SystematicEncoder;

/// Column weight used by [`generate_code`].
pub const COLUMN_WEIGHT: usize = 3;
/// Seeds tried by [`generate_code`] before giving up on a 4-cycle-free graph.
const MAX_ATTEMPTS: u64 = 8;

/// Full-length code: 9216 bits, rate 0.89, PEG seed 1.
pub const CODE_9216: &str = include_str!("../../codes/peg_n9216_r089_s1.alist");
/// Desk-scale code: 2304 bits, rate 0.89, PEG seed 1.
pub const CODE_2304: &str = include_str!("../../codes/peg_n2304_r089_s1.alist");

/// Binary LDPC code with its systematic encoder and decoder graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdpcCode {
    h: ParityCheck,
    encoder: SystematicEncoder,
    graph: TannerGraph,
}

impl LdpcCode {
    pub fn from_parity_check(h: ParityCheck) -> Self {
        let encoder = SystematicEncoder::new(&h);
        let graph = TannerGraph::new(&h);
        Self { h, encoder, graph }
    }

    pub fn from_alist(text: &str) -> Result<Self> {
        Ok(Self::from_parity_check(from_alist(text)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_alist(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_alist()).map_err(|e| Error::io(path, e))
    }

    pub fn to_alist(&self) -> String {
        to_alist(&self.h)
    }

    /// The stored length-9216 code.
    pub fn standard() -> Self {
        Self::from_alist(CODE_9216).expect("bundled alist parses")
    }

    /// The stored length-2304 code of the same rate.
    pub fn desk_scale() -> Self {
        Self::from_alist(CODE_2304).expect("bundled alist parses")
    }

    pub fn parity_check(&self) -> &ParityCheck {
        &self.h
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.h.n_cols()
    }

    /// Information length, `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.n() - self.encoder.rank()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Codeword positions carrying the information bits, in order.
    pub fn info_positions(&self) -> &[usize] {
        self.encoder.info_positions()
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: info.len(),
            });
        }
        Ok(self.encoder.encode(info))
    }

    /// Information bits read back from a (decoded) codeword.
    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        self.info_positions().iter().map(|&p| codeword[p]).collect()
    }

    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        bits.len() == self.n() && self.h.syndrome_ok(bits)
    }

    /// Sum-product decoding with at most `max_iter` flooding iterations.
    pub fn decode(&self, channel_llrs: &[f64], max_iter: usize) -> Result<DecodeResult> {
        self.decode_with(channel_llrs, max_iter, CheckRule::SumProduct)
    }

    pub fn decode_with(&self, channel_llrs: &[f64], max_iter: usize, rule: CheckRule) -> Result<DecodeResult> {
        if channel_llrs.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: channel_llrs.len(),
            });
        }
        if channel_llrs.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParams("channel LLRs must be finite".into()));
        }
        Ok(self.graph.decode(channel_llrs, max_iter, rule))
    }
}

/// Number of parity checks for a code of length `n` and design rate `rate`.
pub fn check_count(n: usize, rate: f64) -> usize {
    (n as f64 * (1.0 - rate)).round() as usize
}

/// Seeded PEG code with column weight 3 and no length-4 cycles.
pub fn generate_code(n_code: usize, rate: f64, seed: u64) -> Result<LdpcCode> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Construction(format!("rate {rate} outside (0, 1)")));
    }
    let m = check_count(n_code, rate);
    if m < COLUMN_WEIGHT {
        return Err(Error::Construction(format!("{m} checks cannot support column weight {COLUMN_WEIGHT}")));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let h = progressive_edge_growth(m, n_code, COLUMN_WEIGHT, seed.wrapping_add(attempt))?;
        if h.girth_at_least_6() {
            return Ok(LdpcCode::from_parity_check(h));
        }
        log::warn!("PEG seed {} produced a 4-cycle, retrying", seed.wrapping_add(attempt));
    }
    Err(Error::Construction(format!("no 4-cycle-free graph after {MAX_ATTEMPTS} attempts")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> LdpcCode {
        generate_code(576, 0.75, 3).unwrap()
    }

    fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn dimensions() {
        let c = small();
        assert_eq!(c.n(), 576);
        assert_eq!(c.parity_check().n_rows(), 144);
        assert!(c.k() >= 576 - 144);
        assert!(c.parity_check().girth_at_least_6());
        assert!(generate_code(100, 1.0, 0).is_err());
        assert!(generate_code(100, 0.99, 0).is_err());
    }

    #[test]
    fn encoding_is_linear_and_systematic() {
        let c = small();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(c.encode(&vec![0; c.k()]).unwrap().iter().all(|&b| b == 0));
        let u1 = random_bits(&mut rng, c.k());
        let u2 = random_bits(&mut rng, c.k());
        let c1 = c.encode(&u1).unwrap();
        let c2 = c.encode(&u2).unwrap();
        assert!(c.is_codeword(&c1) && c.is_codeword(&c2));
        let sum: Vec<u8> = c1.iter().zip(&c2).map(|(a, b)| a ^ b).collect();
        assert!(c.is_codeword(&sum));
        assert_eq!(c.extract_info(&c1), u1);
        assert!(matches!(c.encode(&[0, 1]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn clean_codeword_decodes_immediately() {
        let c = small();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cw = c.encode(&random_bits(&mut rng, c.k())).unwrap();
        let llr: Vec<f64> = cw.iter().map(|&b| if b == 0 { 30.0 } else { -30.0 }).collect();
        let r = c.decode(&llr, 50).unwrap();
        assert!(r.syndrome_ok);
        assert!(r.iterations <= 1);
        assert_eq!(r.hard_bits, cw);
    }

    #[test]
    fn corrects_single_flip() {
        let c = small();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cw = c.encode(&random_bits(&mut rng, c.k())).unwrap();
        let mut llr: Vec<f64> = cw.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
        llr[17] = -llr[17] * 0.5;
        assert!(!c.parity_check().syndrome_ok(&llr.iter().map(|&l| u8::from(l < 0.0)).collect::<Vec<_>>()));
        for rule in [CheckRule::SumProduct, CheckRule::MinSum] {
            let r = c.decode_with(&llr, 50, rule).unwrap();
            assert!(r.syndrome_ok);
            assert_eq!(r.hard_bits, cw);
        }
    }

    #[test]
    fn extrinsic_identity() {
        let c = small();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cw = c.encode(&random_bits(&mut rng, c.k())).unwrap();
        let llr: Vec<f64> = cw
            .iter()
            .map(|&b| (if b == 0 { 1.0 } else { -1.0 }) * 0.8 + rng.random_range(-1.5..1.5))
            .collect();
        for iters in [0, 1, 5, 50] {
            let r = c.decode(&llr, iters).unwrap();
            for i in 0..c.n() {
                assert_eq!(r.extrinsic[i] + llr[i], r.posterior[i]);
            }
        }
        let zero = c.decode(&vec![0.0; c.n()], 10).unwrap();
        assert_eq!(zero.extrinsic, zero.posterior);
    }

    #[test]
    fn decoding_is_deterministic() {
        let c = small();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let llr: Vec<f64> = (0..c.n()).map(|_| rng.random_range(-2.0..3.0)).collect();
        assert_eq!(c.decode(&llr, 20).unwrap(), c.decode(&llr, 20).unwrap());
    }

    #[test]
    fn rejects_bad_llrs() {
        let c = small();
        assert!(c.decode(&[0.0; 3], 5).is_err());
        let mut llr = vec![1.0; c.n()];
        llr[0] = f64::NAN;
        assert!(c.decode(&llr, 5).is_err());
    }

    #[test]
    fn alist_round_trip() {
        let c = small();
        let back = LdpcCode::from_alist(&c.to_alist()).unwrap();
        assert_eq!(back, c);
    }
}
