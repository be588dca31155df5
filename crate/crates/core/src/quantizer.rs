//! Read-threshold design: scalar quantizers that maximize the mutual
//! information between a page bit and the quantized read voltage.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::DeviceParams;
use crate::detector::GrayMap;
use crate::error::{Error, Result};
use crate::math::{log2, normal_interval_prob};

/// Default fine-grid resolution for channel discretization.
pub const DEFAULT_FINE_BINS: usize = 1000;
/// Grid half-margin around the extreme state means, in units of the largest
/// state standard deviation.
pub const GRID_MARGIN_SIGMAS: f64 = 6.0;
/// Largest probability mass allowed to fall outside the fine grid.
pub const MAX_TAIL_MASS: f64 = 1e-6;

/// Scalar quantizer given by strictly increasing thresholds. Region `r`
/// is `[t[r-1], t[r])`, with the outermost regions unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScalarQuantizer {
    thresholds: Vec<f64>,
}

impl ScalarQuantizer {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidQuantizer("thresholds must be finite".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQuantizer("thresholds must be strictly increasing".into()));
        }
        Ok(Self { thresholds })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn regions(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Voltage interval `[lo, hi)` of region `bin`.
    pub fn region(&self, bin: usize) -> (f64, f64) {
        let lo = if bin == 0 { f64::NEG_INFINITY } else { self.thresholds[bin - 1] };
        let hi = self.thresholds.get(bin).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    /// Region containing `y`; a read exactly on a threshold goes right.
    pub fn quantize(&self, y: f64) -> usize {
        self.thresholds.partition_point(|&t| t <= y)
    }

    pub fn quantize_all(&self, y: &[f64]) -> Vec<usize> {
        y.iter().map(|&v| self.quantize(v)).collect()
    }

    /// Quantizer whose thresholds are the union of both inputs. Its region
    /// index is equivalent to the pair of regions of `self` and `other`.
    pub fn merge(&self, other: &ScalarQuantizer) -> ScalarQuantizer {
        let mut t: Vec<f64> = self.thresholds.iter().chain(&other.thresholds).copied().collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        ScalarQuantizer { thresholds: t }
    }
}

impl TryFrom<Vec<f64>> for ScalarQuantizer {
    type Error = Error;
    fn try_from(t: Vec<f64>) -> Result<Self> {
        Self::new(t)
    }
}

impl From<ScalarQuantizer> for Vec<f64> {
    fn from(q: ScalarQuantizer) -> Self {
        q.thresholds
    }
}

/// A page of an MLC word-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Page {
    Lsb,
    Msb,
}

impl Page {
    pub fn bit(self) -> usize {
        match self {
            Page::Lsb => 0,
            Page::Msb => 1,
        }
    }

    /// Read regions per page: three LSB and six MSB read references.
    pub fn default_regions(self) -> usize {
        match self {
            Page::Lsb => 4,
            Page::Msb => 7,
        }
    }
}

/// Binary-input channel from a page bit to a fine voltage bin. The first and
/// last bins absorb the tails beyond the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDmc {
    pub transition: [Vec<f64>; 2],
    pub bin_edges: Vec<f64>,
}

impl BinaryDmc {
    pub fn bins(&self) -> usize {
        self.transition[0].len()
    }

    /// Channel obtained by grouping fine bins at the given cut positions.
    /// `cuts` are strictly increasing interior bin indices; region `r` spans
    /// fine bins `cuts[r-1] .. cuts[r]`.
    pub fn grouped(&self, cuts: &[usize]) -> [Vec<f64>; 2] {
        let bounds: Vec<usize> = std::iter::once(0).chain(cuts.iter().copied()).chain(std::iter::once(self.bins())).collect();
        let group = |row: &[f64]| bounds.windows(2).map(|w| row[w[0]..w[1]].iter().sum()).collect();
        [group(&self.transition[0]), group(&self.transition[1])]
    }

    pub fn mutual_information(&self, input_prior: [f64; 2]) -> f64 {
        mutual_information(&self.transition, &input_prior)
    }
}

/// Mutual information in bits of a discrete channel `channel[input][output]`.
pub fn mutual_information(channel: &[Vec<f64>], input_prior: &[f64]) -> f64 {
    let outputs = channel.first().map_or(0, Vec::len);
    let mut mi = 0.0;
    for j in 0..outputs {
        let py: f64 = channel.iter().zip(input_prior).map(|(row, p)| p * row[j]).sum();
        for (row, &p) in channel.iter().zip(input_prior) {
            let pj = row[j];
            if p > 0.0 && pj > 0.0 {
                mi += p * pj * log2(pj / py);
            }
        }
    }
    mi
}

/// Uniform fine grid wide enough to hold every conditional Gaussian of the
/// device to within `GRID_MARGIN_SIGMAS` standard deviations.
pub fn fine_grid(params: &DeviceParams, bins: usize) -> Vec<f64> {
    let table = params.state_table();
    let margin = GRID_MARGIN_SIGMAS * table.max_std();
    let lo = table.mean.iter().copied().fold(f64::INFINITY, f64::min) - margin;
    let hi = table.mean.iter().copied().fold(f64::NEG_INFINITY, f64::max) + margin;
    (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect()
}

/// Discretizes the single-cell channel seen by one page on the fine grid.
///
/// `transition[b][j]` averages, over the levels whose page bit is `b`, the
/// mixture probability of fine bin `j`.
pub fn discretize_page_channel(
    params: &DeviceParams,
    gray: &GrayMap,
    page: Page,
    grid: &[f64],
) -> Result<BinaryDmc> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidQuantizer("fine grid edges must be strictly increasing".into()));
    }
    if gray.q() != params.q() {
        return Err(Error::LengthMismatch {
            expected: params.q(),
            actual: gray.q(),
        });
    }
    let bins = grid.len() - 1;
    let (lo, hi) = (grid[0], grid[bins]);
    let table = params.state_table();
    let ns = table.state_count();
    let mut level_rows = vec![vec![0.0; bins]; params.q()];
    let mut tail_mass: f64 = 0.0;
    for (x, row) in level_rows.iter_mut().enumerate() {
        let mut tails = 0.0;
        for k in x * ns..(x + 1) * ns {
            let (m, v) = (table.mean[k], table.var[k]);
            let below = normal_interval_prob(f64::NEG_INFINITY, lo, m, v);
            let above = normal_interval_prob(hi, f64::INFINITY, m, v);
            tails += below + above;
            row[0] += below;
            row[bins - 1] += above;
            for j in 0..bins {
                row[j] += normal_interval_prob(grid[j], grid[j + 1], m, v);
            }
        }
        row.iter_mut().for_each(|p| *p /= ns as f64);
        tail_mass = tail_mass.max(tails / ns as f64);
    }
    if tail_mass > MAX_TAIL_MASS {
        return Err(Error::GridCoverage { tail_mass });
    }
    let mut transition = [vec![0.0; bins], vec![0.0; bins]];
    let mut counts = [0usize; 2];
    for (x, row) in level_rows.iter().enumerate() {
        let b = gray.bit(x, page.bit()) as usize;
        counts[b] += 1;
        for (t, p) in transition[b].iter_mut().zip(row) {
            *t += p;
        }
    }
    for b in 0..2 {
        transition[b].iter_mut().for_each(|p| *p /= counts[b] as f64);
    }
    Ok(BinaryDmc {
        transition,
        bin_edges: grid.to_vec(),
    })
}

/// Mutual information contributed by one output region holding mass `p0`
/// under bit 0 and `p1` under bit 1, for equiprobable bits.
fn region_information(p0: f64, p1: f64) -> f64 {
    let py = 0.5 * (p0 + p1);
    let term = |p: f64| if p > 0.0 { 0.5 * p * log2(p / py) } else { 0.0 };
    term(p0) + term(p1)
}

/// Optimal grouping of the fine bins into `k` voltage-contiguous regions.
///
/// Returns the interior cut positions and the achieved mutual information
/// (equiprobable input). Dynamic program over prefixes:
/// `best[r][j]` is the largest information from splitting the first `j` fine
/// bins into `r` regions.
pub fn optimal_cuts(dmc: &BinaryDmc, k: usize) -> Result<(Vec<usize>, f64)> {
    let n = dmc.bins();
    if k == 0 || k > n {
        return Err(Error::InfeasibleRegions { bins: n, regions: k });
    }
    let prefix = |row: &[f64]| {
        let mut c = Vec::with_capacity(n + 1);
        c.push(0.0);
        let mut acc = 0.0;
        for &p in row {
            acc += p;
            c.push(acc);
        }
        c
    };
    let (c0, c1) = (prefix(&dmc.transition[0]), prefix(&dmc.transition[1]));
    let gain = |i: usize, j: usize| region_information(c0[j] - c0[i], c1[j] - c1[i]);

    let mut best = vec![vec![f64::NEG_INFINITY; n + 1]; k + 1];
    let mut arg = vec![vec![0usize; n + 1]; k + 1];
    for j in 1..=n {
        best[1][j] = gain(0, j);
    }
    for r in 2..=k {
        // Region r ends at j; the first r - 1 regions need r - 1 bins, and
        // the remaining k - r regions need k - r bins after j.
        for j in r..=n - (k - r) {
            let (mut b, mut a) = (f64::NEG_INFINITY, 0);
            for i in (r - 1)..j {
                let v = best[r - 1][i] + gain(i, j);
                if v > b {
                    b = v;
                    a = i;
                }
            }
            best[r][j] = b;
            arg[r][j] = a;
        }
    }
    let mut cuts = vec![0; k - 1];
    let mut j = n;
    for r in (2..=k).rev() {
        j = arg[r][j];
        cuts[r - 2] = j;
    }
    Ok((cuts, best[k][n]))
}

/// MI-maximizing `k`-region quantizer with thresholds on fine-grid edges.
pub fn optimize_quantizer(dmc: &BinaryDmc, k: usize) -> Result<ScalarQuantizer> {
    let (cuts, _) = optimal_cuts(dmc, k)?;
    ScalarQuantizer::new(cuts.iter().map(|&c| dmc.bin_edges[c]).collect())
}

/// Read quantizers for both pages of an MLC word-line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageQuantizers {
    pub lsb: ScalarQuantizer,
    pub msb: ScalarQuantizer,
}

impl PageQuantizers {
    /// Designs both page quantizers from the model on a uniform fine grid.
    pub fn design(params: &DeviceParams, gray: &GrayMap, fine_bins: usize) -> Result<Self> {
        let grid = fine_grid(params, fine_bins);
        let design = |page: Page| -> Result<ScalarQuantizer> {
            let dmc = discretize_page_channel(params, gray, page, &grid)?;
            optimize_quantizer(&dmc, page.default_regions())
        };
        Ok(Self {
            lsb: design(Page::Lsb)?,
            msb: design(Page::Msb)?,
        })
    }

    /// The detector's view when both pages are read: the pair of page
    /// regions, expressed as one quantizer over the union of thresholds.
    pub fn joint(&self) -> ScalarQuantizer {
        self.lsb.merge(&self.msb)
    }

    pub fn page(&self, page: Page) -> &ScalarQuantizer {
        match page {
            Page::Lsb => &self.lsb,
            Page::Msb => &self.msb,
        }
    }
}

/// One designed operating point, as stored in a quantizer record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizerRecord {
    pub gamma_v: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lsb: ScalarQuantizer,
    pub msb: ScalarQuantizer,
}

/// Human-readable collection of designed quantizers (TOML).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizerBook {
    #[serde(default, rename = "point")]
    pub points: Vec<QuantizerRecord>,
}

impl QuantizerBook {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("quantizer book serializes")
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&s)
    }

    /// Record matching an operating point exactly, if present.
    pub fn find(&self, gamma_v: f64, alpha: f64, beta: f64) -> Option<PageQuantizers> {
        self.points
            .iter()
            .find(|r| r.gamma_v == gamma_v && r.alpha == alpha && r.beta == beta)
            .map(|r| PageQuantizers {
                lsb: r.lsb.clone(),
                msb: r.msb.clone(),
            })
    }
}
