//! Flooding-schedule belief propagation.

use serde::{Deserialize, Serialize};

use crate::ldpc::sparse::ParityCheck;

/// Message saturation inside the decoder.
pub const DECODER_LLR_CLAMP: f64 = 30.0;

/// Check-node update rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRule {
    /// Exact tanh rule.
    #[default]
    SumProduct,
    MinSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub hard_bits: Vec<u8>,
    /// Input LLR plus extrinsic.
    pub posterior: Vec<f64>,
    /// Sum of the incoming check messages of each bit.
    pub extrinsic: Vec<f64>,
    pub iterations: usize,
    pub syndrome_ok: bool,
}

/// Edge layout: edges are numbered row by row; `var_edges` lists them per
/// column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TannerGraph {
    row_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
}

impl TannerGraph {
    pub fn new(h: &ParityCheck) -> Self {
        let mut row_start = vec![0];
        let mut edge_var = Vec::with_capacity(h.edges());
        for row in h.rows() {
            edge_var.extend_from_slice(row);
            row_start.push(edge_var.len());
        }
        let mut per_var = vec![Vec::new(); h.n_cols()];
        for (e, &v) in edge_var.iter().enumerate() {
            per_var[v].push(e);
        }
        let mut var_start = vec![0];
        let mut var_edges = Vec::with_capacity(edge_var.len());
        for list in per_var {
            var_edges.extend(list);
            var_start.push(var_edges.len());
        }
        Self {
            row_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    fn syndrome_ok(&self, bits: &[u8]) -> bool {
        self.row_start.windows(2).all(|w| {
            self.edge_var[w[0]..w[1]].iter().fold(0u8, |acc, &v| acc ^ bits[v]) == 0
        })
    }

    pub fn decode(&self, channel: &[f64], max_iter: usize, rule: CheckRule) -> DecodeResult {
        let n = self.var_start.len() - 1;
        assert_eq!(channel.len(), n, "LLR length must equal the code length");
        let clamp = |x: f64| x.clamp(-DECODER_LLR_CLAMP, DECODER_LLR_CLAMP);
        let hard = |x: f64| u8::from(x < 0.0);

        let mut hard_bits: Vec<u8> = channel.iter().map(|&l| hard(l)).collect();
        let mut extrinsic = vec![0.0; n];
        if self.syndrome_ok(&hard_bits) {
            return DecodeResult {
                posterior: channel.iter().zip(&extrinsic).map(|(l, e)| l + e).collect(),
                hard_bits,
                extrinsic,
                iterations: 0,
                syndrome_ok: true,
            };
        }

        let edges = self.edge_var.len();
        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| clamp(channel[v])).collect();
        let mut c2v = vec![0.0; edges];
        let mut scratch = Vec::new();
        let mut iterations = 0;
        let mut ok = false;
        while iterations < max_iter {
            iterations += 1;
            for w in self.row_start.windows(2) {
                let (a, b) = (w[0], w[1]);
                match rule {
                    CheckRule::SumProduct => check_tanh(&v2c[a..b], &mut c2v[a..b], &mut scratch),
                    CheckRule::MinSum => check_min_sum(&v2c[a..b], &mut c2v[a..b]),
                }
            }
            for v in 0..n {
                let es = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
                let ext: f64 = es.iter().map(|&e| c2v[e]).sum();
                extrinsic[v] = ext;
                let post = channel[v] + ext;
                hard_bits[v] = hard(post);
                let post_c = clamp(channel[v]) + ext;
                for &e in es {
                    v2c[e] = clamp(post_c - c2v[e]);
                }
            }
            if self.syndrome_ok(&hard_bits) {
                ok = true;
                break;
            }
        }
        DecodeResult {
            posterior: channel.iter().zip(&extrinsic).map(|(l, e)| l + e).collect(),
            hard_bits,
            extrinsic,
            iterations,
            syndrome_ok: ok,
        }
    }
}

fn check_tanh(input: &[f64], output: &mut [f64], scratch: &mut Vec<f64>) {
    let d = input.len();
    scratch.clear();
    scratch.extend(input.iter().map(|&m| (0.5 * m).tanh()));
    // Exclusive products via a running prefix and a suffix pass.
    let mut prefix = 1.0;
    for i in 0..d {
        output[i] = prefix;
        prefix *= scratch[i];
    }
    let mut suffix = 1.0;
    for i in (0..d).rev() {
        let p = output[i] * suffix;
        output[i] = (2.0 * p.atanh()).clamp(-DECODER_LLR_CLAMP, DECODER_LLR_CLAMP);
        suffix *= scratch[i];
    }
}

fn check_min_sum(input: &[f64], output: &mut [f64]) {
    let mut sign = 1.0;
    let (mut min1, mut min2, mut at) = (f64::INFINITY, f64::INFINITY, 0);
    for (i, &m) in input.iter().enumerate() {
        if m < 0.0 {
            sign = -sign;
        }
        let a = m.abs();
        if a < min1 {
            min2 = min1;
            min1 = a;
            at = i;
        } else if a < min2 {
            min2 = a;
        }
    }
    for (i, (o, &m)) in output.iter_mut().zip(input).enumerate() {
        let mag = if i == at { min2 } else { min1 };
        let s = if m < 0.0 { -sign } else { sign };
        *o = s * mag;
    }
}
