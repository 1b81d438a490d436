//! tanh-RNN and LSTM cells with explicit single-step backward passes.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Deserialize;

use crate::linalg::{sigmoid, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Tanh,
    Lstm,
}

impl CellKind {
    /// Number of stacked pre-activation blocks.
    pub fn gates(self) -> usize {
        match self {
            CellKind::Tanh => 1,
            CellKind::Lstm => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Tanh => "tanh",
            CellKind::Lstm => "lstm",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CellKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tanh" => Ok(CellKind::Tanh),
            "lstm" => Ok(CellKind::Lstm),
            _ => Err(format!("unknown cell kind {s:?} (expected tanh or lstm)")),
        }
    }
}

/// `h' = f(W_x x + W_h h + b)`. LSTM blocks are stacked in the order
/// input, forget, candidate, output.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnCell {
    pub kind: CellKind,
    pub wx: Matrix,
    pub wh: Matrix,
    /// Column vector.
    pub b: Matrix,
}

/// Everything one step needs for its backward pass.
#[derive(Debug, Clone)]
pub struct CellStep {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    /// Post-activation gate values.
    pub gates: Vec<f64>,
    /// LSTM memory; empty for tanh cells.
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

impl RnnCell {
    pub fn new<R: Rng>(kind: CellKind, input: usize, hidden: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        let rows = kind.gates() * hidden;
        let wx = Matrix::uniform(rows, input, bound, rng);
        let wh = Matrix::uniform(rows, hidden, bound, rng);
        let mut b = Matrix::zeros(rows, 1);
        if kind == CellKind::Lstm {
            for v in &mut b.data[hidden..2 * hidden] {
                *v = 1.0;
            }
        }
        RnnCell { kind, wx, wh, b }
    }

    pub fn zeros_like(&self) -> Self {
        RnnCell {
            kind: self.kind,
            wx: Matrix::zeros(self.wx.rows, self.wx.cols),
            wh: Matrix::zeros(self.wh.rows, self.wh.cols),
            b: Matrix::zeros(self.b.rows, 1),
        }
    }

    pub fn hidden(&self) -> usize {
        self.wh.cols
    }

    pub fn input_size(&self) -> usize {
        self.wx.cols
    }

    pub fn initial_memory(&self) -> Vec<f64> {
        match self.kind {
            CellKind::Tanh => Vec::new(),
            CellKind::Lstm => vec![0.0; self.hidden()],
        }
    }

    pub fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> CellStep {
        let hs = self.hidden();
        let mut z = self.b.data.clone();
        self.wx.mul_vec_acc(x, &mut z);
        self.wh.mul_vec_acc(h_prev, &mut z);
        let (gates, c, h) = match self.kind {
            CellKind::Tanh => {
                let h: Vec<f64> = z.iter().map(|v| v.tanh()).collect();
                (h.clone(), Vec::new(), h)
            }
            CellKind::Lstm => {
                let mut g = z;
                for (k, v) in g.iter_mut().enumerate() {
                    *v = if (2 * hs..3 * hs).contains(&k) { v.tanh() } else { sigmoid(*v) };
                }
                let c: Vec<f64> = (0..hs)
                    .map(|j| g[hs + j] * c_prev[j] + g[j] * g[2 * hs + j])
                    .collect();
                let h = (0..hs).map(|j| g[3 * hs + j] * c[j].tanh()).collect();
                (g, c, h)
            }
        };
        CellStep {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            gates,
            c,
            h,
        }
    }

    /// Accumulates parameter gradients into `grad` and returns the
    /// gradients with respect to `x`, `h_prev` and `c_prev`.
    pub fn backward(
        &self,
        st: &CellStep,
        dh: &[f64],
        dc_next: &[f64],
        grad: &mut RnnCell,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let hs = self.hidden();
        let (dz, dc_prev) = match self.kind {
            CellKind::Tanh => {
                let dz: Vec<f64> = (0..hs).map(|j| dh[j] * (1.0 - st.h[j] * st.h[j])).collect();
                (dz, Vec::new())
            }
            CellKind::Lstm => {
                let g = &st.gates;
                let mut dz = vec![0.0; 4 * hs];
                let mut dc_prev = vec![0.0; hs];
                for j in 0..hs {
                    let (i, f, cand, o) = (g[j], g[hs + j], g[2 * hs + j], g[3 * hs + j]);
                    let tc = st.c[j].tanh();
                    let dc = dc_next[j] + dh[j] * o * (1.0 - tc * tc);
                    dz[j] = dc * cand * i * (1.0 - i);
                    dz[hs + j] = dc * st.c_prev[j] * f * (1.0 - f);
                    dz[2 * hs + j] = dc * i * (1.0 - cand * cand);
                    dz[3 * hs + j] = dh[j] * tc * o * (1.0 - o);
                    dc_prev[j] = dc * f;
                }
                (dz, dc_prev)
            }
        };
        grad.wx.add_outer(&dz, &st.x, 1.0);
        grad.wh.add_outer(&dz, &st.h_prev, 1.0);
        for (b, d) in grad.b.data.iter_mut().zip(&dz) {
            *b += d;
        }
        let mut dx = vec![0.0; self.input_size()];
        self.wx.mul_vec_t_acc(&dz, &mut dx);
        let mut dh_prev = vec![0.0; hs];
        self.wh.mul_vec_t_acc(&dz, &mut dh_prev);
        (dx, dh_prev, dc_prev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lstm_gates_stay_in_range_over_long_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cell = RnnCell::new(CellKind::Lstm, 3, 4, &mut rng);
        let mut h = vec![0.0; 4];
        let mut c = cell.initial_memory();
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let st = cell.step(&x, &h, &c);
            for (k, g) in st.gates.iter().enumerate() {
                if !(8..12).contains(&k) {
                    assert!(*g > 0.0 && *g < 1.0);
                }
            }
            assert!(st.h.iter().chain(&st.c).all(|v| v.is_finite()));
            h = st.h;
            c = st.c;
        }
    }

    #[test]
    fn forget_bias_starts_at_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cell = RnnCell::new(CellKind::Lstm, 2, 3, &mut rng);
        assert_eq!(cell.b.data, [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }
}
