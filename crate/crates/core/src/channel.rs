//! Physical flash channel: nominal levels, programming noise, and ICI from the
//! next word-line.
//!
//! Each victim cell `i` on the read word-line is disturbed by three aggressors
//! on the subsequently programmed word-line: upper-left (`i - 1`), upper (`i`)
//! and upper-right (`i + 1`). The aggressor levels form the channel state of
//! the victim, and conditioned on that state the read voltage is Gaussian.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{log_normal_pdf, normal_pdf, std_normal_cdf};

/// Nominal voltages of the MLC template.
pub const MLC_NOMINAL_VOLTAGES: [f64; 4] = [1.1, 2.7, 3.3, 3.9];
/// Noise standard deviations of the MLC template at unit noise factor.
pub const MLC_NOISE_STD: [f64; 4] = [0.35, 0.09, 0.09, 0.09];

/// Device physics for a `q`-level cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    nominal_voltage: Vec<f64>,
    noise_std: Vec<f64>,
    gamma_v: f64,
    gamma_d: f64,
}

impl DeviceParams {
    pub fn new(
        nominal_voltage: Vec<f64>,
        noise_std: Vec<f64>,
        gamma_v: f64,
        gamma_d: f64,
    ) -> Result<Self> {
        let q = nominal_voltage.len();
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "level count {q} must be a power of two >= 2"
            )));
        }
        if noise_std.len() != q {
            return Err(Error::LengthMismatch {
                expected: q,
                actual: noise_std.len(),
            });
        }
        if nominal_voltage.iter().any(|v| !v.is_finite())
            || nominal_voltage.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidParams(
                "nominal voltages must be finite and strictly increasing".into(),
            ));
        }
        if noise_std.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParams("noise std must be positive".into()));
        }
        if !(gamma_v >= 0.0 && gamma_v.is_finite() && gamma_d >= 0.0 && gamma_d.is_finite()) {
            return Err(Error::InvalidParams(
                "coupling ratios must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            nominal_voltage,
            noise_std,
            gamma_v,
            gamma_d,
        })
    }

    /// MLC template with noise factor `beta` folded into the noise scales and
    /// diagonal coupling `gamma_d = alpha * gamma_v`.
    pub fn mlc(beta: f64, gamma_v: f64, alpha: f64) -> Result<Self> {
        Self::new(
            MLC_NOMINAL_VOLTAGES.to_vec(),
            MLC_NOISE_STD.iter().map(|s| s * beta).collect(),
            gamma_v,
            alpha * gamma_v,
        )
    }

    pub fn q(&self) -> usize {
        self.nominal_voltage.len()
    }

    pub fn bits_per_cell(&self) -> usize {
        self.q().trailing_zeros() as usize
    }

    /// Number of channel states, `q^3`.
    pub fn state_count(&self) -> usize {
        self.q().pow(3)
    }

    pub fn nominal_voltage(&self) -> &[f64] {
        &self.nominal_voltage
    }

    pub fn noise_std(&self) -> &[f64] {
        &self.noise_std
    }

    pub fn gamma_v(&self) -> f64 {
        self.gamma_v
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    /// Copy with every nominal voltage moved by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            nominal_voltage: self.nominal_voltage.iter().map(|v| v + offset).collect(),
            ..self.clone()
        }
    }

    fn coupling(&self, position: usize) -> f64 {
        if position == 1 {
            self.gamma_v
        } else {
            self.gamma_d
        }
    }

    /// Conditional mean of the read voltage given victim level `x` and state `s`.
    pub fn state_mean(&self, x: usize, s: AggressorState) -> f64 {
        let v0 = self.nominal_voltage[0];
        let shift: f64 = s
            .levels()
            .iter()
            .enumerate()
            .map(|(j, &a)| self.coupling(j) * (self.nominal_voltage[a] - v0))
            .sum();
        self.nominal_voltage[x] + shift
    }

    /// Conditional variance: victim noise plus the propagated noise of every
    /// programmed aggressor. Erased aggressors contribute nothing.
    pub fn state_var(&self, x: usize, s: AggressorState) -> f64 {
        let var0 = self.noise_std[0].powi(2);
        let propagated: f64 = s
            .levels()
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a != 0)
            .map(|(j, &a)| self.coupling(j).powi(2) * (self.noise_std[a].powi(2) + var0))
            .sum();
        self.noise_std[x].powi(2) + propagated
    }

    pub fn conditional_likelihood(&self, y: f64, x: usize, s: AggressorState) -> f64 {
        normal_pdf(y, self.state_mean(x, s), self.state_var(x, s))
    }

    pub fn conditional_log_likelihood(&self, y: f64, x: usize, s: AggressorState) -> f64 {
        log_normal_pdf(y, self.state_mean(x, s), self.state_var(x, s))
    }

    /// Equal-weight Gaussian mixture components `(weight, mean, var)` of the
    /// single-cell output law for input `x`, one per aggressor state.
    pub fn mixture_components(&self, x: usize) -> Vec<(f64, f64, f64)> {
        let w = 1.0 / self.state_count() as f64;
        AggressorState::all(self.q())
            .map(|s| (w, self.state_mean(x, s), self.state_var(x, s)))
            .collect()
    }

    /// Single-cell output density, marginalized over i.u.d. aggressors.
    pub fn single_cell_likelihood(&self, y: f64, x: usize) -> f64 {
        self.mixture_components(x)
            .into_iter()
            .map(|(w, m, v)| w * normal_pdf(y, m, v))
            .sum()
    }

    pub fn single_cell_log_likelihood(&self, y: f64, x: usize) -> f64 {
        let logs: Vec<f64> = self
            .mixture_components(x)
            .into_iter()
            .map(|(w, m, v)| w.ln() + log_normal_pdf(y, m, v))
            .collect();
        crate::math::log_sum_exp(&logs)
    }

    /// CDF of the single-cell output law.
    pub fn single_cell_cdf(&self, y: f64, x: usize) -> f64 {
        self.mixture_components(x)
            .into_iter()
            .map(|(w, m, v)| w * std_normal_cdf((y - m) / v.sqrt()))
            .sum()
    }

    /// Precomputed per-(level, state) Gaussian statistics.
    pub fn state_table(&self) -> StateTable {
        let q = self.q();
        let ns = self.state_count();
        let mut mean = Vec::with_capacity(q * ns);
        let mut var = Vec::with_capacity(q * ns);
        for x in 0..q {
            for s in AggressorState::all(q) {
                mean.push(self.state_mean(x, s));
                var.push(self.state_var(x, s));
            }
        }
        StateTable { q, mean, var }
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level >= self.q() {
            Err(Error::LevelOutOfRange {
                level,
                q: self.q(),
            })
        } else {
            Ok(())
        }
    }
}

/// Levels of the (upper-left, upper, upper-right) aggressors of one victim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AggressorState([usize; 3]);

impl AggressorState {
    pub fn new(upper_left: usize, upper: usize, upper_right: usize) -> Self {
        Self([upper_left, upper, upper_right])
    }

    pub fn levels(&self) -> [usize; 3] {
        self.0
    }

    /// Dense index `s1 * q^2 + s2 * q + s3`.
    pub fn index(&self, q: usize) -> usize {
        (self.0[0] * q + self.0[1]) * q + self.0[2]
    }

    pub fn from_index(index: usize, q: usize) -> Self {
        Self([index / (q * q), (index / q) % q, index % q])
    }

    pub fn all(q: usize) -> impl Iterator<Item = AggressorState> {
        (0..q * q * q).map(move |i| Self::from_index(i, q))
    }
}

/// Gaussian statistics for every (victim level, state) pair, indexed
/// `x * q^3 + state_index`.
#[derive(Debug, Clone)]
pub struct StateTable {
    q: usize,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl StateTable {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn state_count(&self) -> usize {
        self.q * self.q * self.q
    }

    /// Largest conditional standard deviation over all (level, state) pairs.
    pub fn max_std(&self) -> f64 {
        self.var.iter().copied().fold(0.0, f64::max).sqrt()
    }
}

/// Unquantized read voltages of one word-line.
#[derive(Debug, Clone, PartialEq)]
pub struct WordlineRead {
    pub y: Vec<f64>,
}

impl WordlineRead {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Simulates reading a victim word-line after its aggressor word-line has
/// been programmed.
///
/// Random draws happen in a fixed order: one victim noise sample per cell in
/// index order, then one (erased, programmed) noise pair per aggressor in
/// index order. Each aggressor's voltage shift is drawn once and shared by
/// every victim it couples to. Cells beyond either end of the aggressor
/// word-line are treated as erased.
pub fn simulate_wordline<R: Rng + ?Sized>(
    params: &DeviceParams,
    victims: &[usize],
    aggressors: &[usize],
    rng: &mut R,
) -> Result<WordlineRead> {
    let n = victims.len();
    if n == 0 {
        return Err(Error::EmptyWordline);
    }
    if aggressors.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: aggressors.len(),
        });
    }
    for &l in victims.iter().chain(aggressors) {
        params.check_level(l)?;
    }
    let v = params.nominal_voltage();
    let sd = params.noise_std();

    let mut y: Vec<f64> = victims
        .iter()
        .map(|&x| {
            let z: f64 = rng.sample(StandardNormal);
            v[x] + sd[x] * z
        })
        .collect();

    let shifts: Vec<f64> = aggressors
        .iter()
        .map(|&a| {
            let erased: f64 = rng.sample(StandardNormal);
            let programmed: f64 = rng.sample(StandardNormal);
            if a == 0 {
                0.0
            } else {
                (v[a] + sd[a] * programmed) - (v[0] + sd[0] * erased)
            }
        })
        .collect();

    let (gv, gd) = (params.gamma_v(), params.gamma_d());
    for (i, yi) in y.iter_mut().enumerate() {
        let left = if i > 0 { shifts[i - 1] } else { 0.0 };
        let right = shifts.get(i + 1).copied().unwrap_or(0.0);
        *yi += gd * left + gv * shifts[i] + gd * right;
    }
    Ok(WordlineRead { y })
}
