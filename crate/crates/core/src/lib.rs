//! Soft detection for NAND flash word-lines under inter-cell interference.
//!
//! The flash channel is modelled as a finite-state Markov channel whose state
//! is the triple of aggressor levels above each victim cell. The crate provides
//!
//! * [`channel`]: device parameters, the physical word-line simulator and the
//!   per-state Gaussian statistics,
//! * [`detector`]: the cell-by-cell benchmark, the forward/backward sum-product
//!   detector, an exhaustive oracle, and posterior/LLR conversions,
//! * [`quantizer`]: mutual-information-maximizing read threshold design,
//! * [`ldpc`]: PEG code construction, alist I/O, systematic encoding and
//!   belief-propagation decoding,
//! * [`harness`]: configuration-driven Monte Carlo BER sweeps, CSV and SVG
//!   output.

pub mod channel;
pub mod detector;
pub mod error;
pub mod harness;
pub mod ldpc;
pub mod math;
pub mod quantizer;

pub use channel::{AggressorState, DeviceParams, WordlineRead};
pub use detector::{BitLlrs, GrayMap, Observations, Pmf, PosteriorPmf, PriorPmf};
pub use error::{Error, Result};
pub use ldpc::{DecodeResult, LdpcCode};
pub use quantizer::{BinaryDmc, Page, PageQuantizers, ScalarQuantizer};
