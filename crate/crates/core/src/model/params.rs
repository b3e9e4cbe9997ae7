use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::tensor::Matrix;
use super::ModelError;
use crate::label::LABEL_COUNT;
use crate::rng::SeededRng;

/// Architecture and regularization settings stored with the weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    /// Embedding dimension.
    pub input_dim: usize,
    /// Hidden units per direction.
    pub hidden: usize,
    /// Stacked bidirectional layers.
    pub layers: usize,
    /// Width of the attention projection.
    pub attention_dim: usize,
    pub dropout: f64,
}

impl Hyperparams {
    pub fn new(input_dim: usize, hidden: usize) -> Self {
        Hyperparams {
            input_dim,
            hidden,
            layers: 3,
            attention_dim: 2 * hidden,
            dropout: 0.3,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.input_dim == 0 || self.hidden == 0 || self.layers == 0 || self.attention_dim == 0 {
            return Err(ModelError::Config(format!(
                "all dimensions must be positive: {self:?}"
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(ModelError::Config(format!(
                "dropout must be in [0, 1), got {}",
                self.dropout
            )));
        }
        Ok(())
    }

    pub(crate) fn layer_input(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            2 * self.hidden
        }
    }
}

/// One LSTM direction. Gate blocks are stacked in the order input, forget,
/// candidate, output; each block has `hidden` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmWeights {
    /// `4H × input`
    pub w_input: Matrix,
    /// `4H × H`
    pub w_recurrent: Matrix,
    /// `4H × 1`
    pub bias: Matrix,
}

impl LstmWeights {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmWeights {
            w_input: Matrix::zeros(4 * hidden, input),
            w_recurrent: Matrix::zeros(4 * hidden, hidden),
            bias: Matrix::zeros(4 * hidden, 1),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_recurrent.cols()
    }

    pub fn input(&self) -> usize {
        self.w_input.cols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiLayer {
    pub forward: LstmWeights,
    pub backward: LstmWeights,
}

/// Every tensor of the stacked Bi-LSTM, attention and output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub hyper: Hyperparams,
    pub layers: Vec<BiLayer>,
    /// `A × 2H` attention projection.
    pub attention_w: Matrix,
    /// `A × 1` attention context vector.
    pub attention_v: Matrix,
    /// `30 × 2H`
    pub output_w: Matrix,
    /// `30 × 1`
    pub output_b: Matrix,
}

fn uniform_fill(m: &mut Matrix, radius: f64, rng: &mut SeededRng) {
    for x in m.data_mut() {
        *x = rng.uniform(-radius, radius);
    }
}

impl ModelParams {
    /// All-zero parameters of the right shapes.
    pub fn zeros(hyper: Hyperparams) -> Self {
        let h = hyper.hidden;
        let layers = (0..hyper.layers)
            .map(|l| BiLayer {
                forward: LstmWeights::zeros(hyper.layer_input(l), h),
                backward: LstmWeights::zeros(hyper.layer_input(l), h),
            })
            .collect();
        ModelParams {
            hyper,
            layers,
            attention_w: Matrix::zeros(hyper.attention_dim, 2 * h),
            attention_v: Matrix::zeros(hyper.attention_dim, 1),
            output_w: Matrix::zeros(LABEL_COUNT, 2 * h),
            output_b: Matrix::zeros(LABEL_COUNT, 1),
        }
    }

    /// Uniform(−r, r) init with `r = 1/sqrt(fan_in)`; forget-gate biases
    /// start at +1.
    pub fn init(hyper: Hyperparams, rng: &mut SeededRng) -> Result<Self, ModelError> {
        hyper.validate()?;
        let mut p = Self::zeros(hyper);
        let h = hyper.hidden;
        for layer in &mut p.layers {
            for dir in [&mut layer.forward, &mut layer.backward] {
                let fan_in = dir.input() + h;
                let r = 1.0 / libm::sqrt(fan_in as f64);
                uniform_fill(&mut dir.w_input, r, rng);
                uniform_fill(&mut dir.w_recurrent, r, rng);
                uniform_fill(&mut dir.bias, r, rng);
                dir.bias.data_mut()[h..2 * h].iter_mut().for_each(|b| *b = 1.0);
            }
        }
        let r = 1.0 / libm::sqrt((2 * h) as f64);
        uniform_fill(&mut p.attention_w, r, rng);
        let r_v = 1.0 / libm::sqrt(hyper.attention_dim as f64);
        uniform_fill(&mut p.attention_v, r_v, rng);
        uniform_fill(&mut p.output_w, r, rng);
        uniform_fill(&mut p.output_b, r, rng);
        Ok(p)
    }

    /// Same shapes, all zeros (gradient accumulator).
    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.hyper)
    }

    /// `(name, tensor)` pairs in canonical order.
    pub fn named_tensors(&self) -> Vec<(String, &Matrix)> {
        let mut out = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            for (dir, w) in [("fwd", &layer.forward), ("bwd", &layer.backward)] {
                out.push((format!("lstm.{l}.{dir}.w_input"), &w.w_input));
                out.push((format!("lstm.{l}.{dir}.w_recurrent"), &w.w_recurrent));
                out.push((format!("lstm.{l}.{dir}.bias"), &w.bias));
            }
        }
        out.push(("attention.w".into(), &self.attention_w));
        out.push(("attention.v".into(), &self.attention_v));
        out.push(("output.w".into(), &self.output_w));
        out.push(("output.b".into(), &self.output_b));
        out
    }

    /// Mutable tensors in the same order as [`named_tensors`](Self::named_tensors).
    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            for w in [&mut layer.forward, &mut layer.backward] {
                out.push(&mut w.w_input);
                out.push(&mut w.w_recurrent);
                out.push(&mut w.bias);
            }
        }
        out.push(&mut self.attention_w);
        out.push(&mut self.attention_v);
        out.push(&mut self.output_w);
        out.push(&mut self.output_b);
        out
    }

    pub fn param_count(&self) -> usize {
        self.named_tensors().iter().map(|(_, m)| m.data().len()).sum()
    }

    /// All values flattened in canonical order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (_, m) in self.named_tensors() {
            out.extend_from_slice(m.data());
        }
        out
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn set_flat(&mut self, values: &[f64]) {
        let mut rest = values;
        for m in self.tensors_mut() {
            let n = m.data().len();
            m.data_mut().copy_from_slice(&rest[..n]);
            rest = &rest[n..];
        }
        assert!(rest.is_empty(), "flat parameter vector too long");
    }

    /// Checks shapes against `hyper` and that every value is finite.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.hyper.validate()?;
        let expected = Self::zeros(self.hyper);
        let ours = self.named_tensors();
        let theirs = expected.named_tensors();
        if ours.len() != theirs.len() {
            return Err(ModelError::Shape(format!(
                "expected {} tensors, found {}",
                theirs.len(),
                ours.len()
            )));
        }
        for ((name, m), (_, e)) in ours.iter().zip(&theirs) {
            if m.shape() != e.shape() {
                return Err(ModelError::Shape(format!(
                    "{name}: shape {:?}, expected {:?}",
                    m.shape(),
                    e.shape()
                )));
            }
            if m.data().iter().any(|x| !x.is_finite()) {
                return Err(ModelError::NonFinite(name.clone()));
            }
        }
        Ok(())
    }
}
