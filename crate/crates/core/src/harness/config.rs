//! Sweep configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{DeviceParams, MLC_NOISE_STD, MLC_NOMINAL_VOLTAGES};
use crate::detector::DetectorKind;
use crate::error::{Error, Result};
use crate::ldpc::{CheckRule, LdpcCode};
use crate::quantizer::DEFAULT_FINE_BINS;

/// A complete experiment description.
///
/// ```toml
/// seed = 7
/// output = "fig5.csv"
/// detectors = ["cell_by_cell", "sum_product"]
///
/// [device]
/// beta = 1.0
///
/// [sweep]
/// gamma_v = [0.10, 0.11, 0.12]
/// alpha = [0.25]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub device: DeviceTemplate,
    pub sweep: Sweep,
    #[serde(default = "default_detectors")]
    pub detectors: Vec<DetectorKind>,
    #[serde(default)]
    pub quantized: bool,
    /// When false only the detector is evaluated; the stop rule then counts
    /// word-lines with any raw bit error.
    #[serde(default = "yes")]
    pub coded: bool,
    #[serde(default = "default_max_in")]
    pub max_in: usize,
    #[serde(default = "one")]
    pub max_out: usize,
    #[serde(default)]
    pub check_rule: CheckRule,
    #[serde(default)]
    pub code: CodeSource,
    /// Optional quantizer record file; points it lacks are designed on the fly.
    #[serde(default)]
    pub quantizers: Option<PathBuf>,
    #[serde(default = "default_fine_bins")]
    pub fine_bins: usize,
    #[serde(default)]
    pub stop: StopRule,
    pub seed: u64,
    pub output: PathBuf,
    /// Write measured wall time; disable for byte-reproducible output.
    #[serde(default = "yes")]
    pub timing: bool,
}

/// MLC device template. Noise scales are multiplied by `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceTemplate {
    #[serde(default = "one_f")]
    pub beta: f64,
    #[serde(default = "default_voltages")]
    pub nominal_voltages: Vec<f64>,
    #[serde(default = "default_noise")]
    pub noise_std: Vec<f64>,
}

impl Default for DeviceTemplate {
    fn default() -> Self {
        Self {
            beta: 1.0,
            nominal_voltages: default_voltages(),
            noise_std: default_noise(),
        }
    }
}

impl DeviceTemplate {
    pub fn params(&self, gamma_v: f64, alpha: f64) -> Result<DeviceParams> {
        DeviceParams::new(
            self.nominal_voltages.clone(),
            self.noise_std.iter().map(|s| s * self.beta).collect(),
            gamma_v,
            alpha * gamma_v,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub gamma_v: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Accumulate trials until `min_wl_errors` erroneous word-lines or
/// `max_trials`, checked after every batch of `batch` trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    #[serde(default = "default_min_errors")]
    pub min_wl_errors: u64,
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
    #[serde(default = "default_batch")]
    pub batch: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_wl_errors: default_min_errors(),
            max_trials: default_max_trials(),
            batch: default_batch(),
        }
    }
}

/// Which parity-check matrix to use: one of the bundled codes or an alist
/// file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeSource {
    #[default]
    Standard,
    DeskScale,
    Alist(PathBuf),
}

impl CodeSource {
    pub fn load(&self) -> Result<LdpcCode> {
        match self {
            CodeSource::Standard => Ok(LdpcCode::standard()),
            CodeSource::DeskScale => Ok(LdpcCode::desk_scale()),
            CodeSource::Alist(p) => LdpcCode::load(p),
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.sweep.gamma_v.is_empty() || self.sweep.alpha.is_empty() {
            return bad("sweep lists must be non-empty");
        }
        if self.detectors.is_empty() {
            return bad("at least one detector is required");
        }
        if self.max_in == 0 || self.max_out == 0 {
            return bad("max_in and max_out must be at least 1");
        }
        if !self.coded && self.max_out > 1 {
            return bad("iterative detection needs coded = true");
        }
        if self.stop.max_trials == 0 || self.stop.batch == 0 {
            return bad("max_trials and batch must be at least 1");
        }
        if !(self.device.beta > 0.0 && self.device.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if self.fine_bins < 16 {
            return bad("fine_bins must be at least 16");
        }
        // Surfaces parameter errors now rather than mid-sweep.
        for &g in &self.sweep.gamma_v {
            for &a in &self.sweep.alpha {
                self.device.params(g, a)?;
            }
        }
        Ok(())
    }
}

fn default_detectors() -> Vec<DetectorKind> {
    vec![DetectorKind::CellByCell, DetectorKind::SumProduct]
}
fn default_max_in() -> usize {
    50
}
fn default_fine_bins() -> usize {
    DEFAULT_FINE_BINS
}
fn default_min_errors() -> u64 {
    100
}
fn default_max_trials() -> u64 {
    1_000_000
}
fn default_batch() -> u64 {
    32
}
fn default_voltages() -> Vec<f64> {
    MLC_NOMINAL_VOLTAGES.to_vec()
}
fn default_noise() -> Vec<f64> {
    MLC_NOISE_STD.to_vec()
}
fn one() -> usize {
    1
}
fn one_f() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
