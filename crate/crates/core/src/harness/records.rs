//! BER records and their CSV form.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detector::DetectorKind;
use crate::error::{Error, Result};
use crate::harness::{OperatingPoint, PointOutcome};

/// First line of every results file.
pub const CSV_SCHEMA: &str = "# flashici-ber v1";

/// One row of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub gamma_v: f64,
    pub alpha: f64,
    pub beta: f64,
    pub detector: DetectorKind,
    pub quantized: bool,
    pub max_in: usize,
    pub max_out: usize,
    pub uncoded_ber: f64,
    /// NaN for detector-only runs.
    pub coded_ber: f64,
    pub wl_errors: u64,
    pub trials: u64,
    pub censored: bool,
    pub seconds: f64,
}

impl BerRecord {
    pub fn new(point: &OperatingPoint, out: &PointOutcome, coded: bool) -> Self {
        Self {
            gamma_v: point.gamma_v,
            alpha: point.alpha,
            beta: point.beta,
            detector: point.detector,
            quantized: point.quantized,
            max_in: point.max_in,
            max_out: point.max_out,
            uncoded_ber: out.counts.uncoded_ber(),
            coded_ber: out.counts.coded_ber(),
            wl_errors: out.wl_errors(coded),
            trials: out.counts.trials,
            censored: out.censored,
            seconds: out.seconds,
        }
    }

    fn check(&self) -> Result<()> {
        let ber_ok = |b: f64| b.is_nan() || (0.0..=1.0).contains(&b);
        if !ber_ok(self.uncoded_ber) || !ber_ok(self.coded_ber) {
            return Err(Error::Csv(format!("BER outside [0, 1] at gamma_v = {}", self.gamma_v)));
        }
        if self.wl_errors > self.trials {
            return Err(Error::Csv(format!(
                "{} word-line errors exceed {} trials",
                self.wl_errors, self.trials
            )));
        }
        Ok(())
    }
}

pub fn write_csv(path: &Path, records: &[BerRecord]) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut file = std::fs::File::create(path).map_err(io)?;
    writeln!(file, "{CSV_SCHEMA}").map_err(io)?;
    let mut w = csv::Writer::from_writer(file);
    if records.is_empty() {
        // Serde writes the header with the first row; keep empty files valid.
        w.write_record(COLUMNS).map_err(|e| Error::Csv(e.to_string()))?;
    }
    for r in records {
        w.serialize(r).map_err(|e| Error::Csv(e.to_string()))?;
    }
    w.flush().map_err(io)
}

pub fn read_csv(path: &Path) -> Result<Vec<BerRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::io(path, e))?;
    if first.trim_end() != CSV_SCHEMA {
        return Err(Error::Csv(format!("expected schema line {CSV_SCHEMA:?}, found {:?}", first.trim_end())));
    }
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers().map_err(|e| Error::Csv(e.to_string()))?;
    if header.iter().ne(COLUMNS) {
        return Err(Error::Csv(format!("unexpected columns {header:?}")));
    }
    let mut out = Vec::new();
    for row in r.deserialize() {
        let rec: BerRecord = row.map_err(|e| Error::Csv(e.to_string()))?;
        rec.check()?;
        out.push(rec);
    }
    Ok(out)
}

const COLUMNS: [&str; 13] = [
    "gamma_v",
    "alpha",
    "beta",
    "detector",
    "quantized",
    "max_in",
    "max_out",
    "uncoded_ber",
    "coded_ber",
    "wl_errors",
    "trials",
    "censored",
    "seconds",
];
