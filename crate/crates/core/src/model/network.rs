//! Forward pass with cached intermediates and exact backpropagation
//! through time.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::params::{LstmWeights, ModelParams};
use super::tensor::{axpy, dot, sigmoid, softmax, Matrix};
use super::{ModelError, Prediction};
use crate::label::{Label, LABEL_COUNT};
use crate::rng::SeededRng;

/// Activations of one LSTM step.
#[derive(Debug, Clone)]
struct StepCache {
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Activated gates, blocks `[i, f, g, o]`.
    gates: Vec<f64>,
    tanh_c: Vec<f64>,
}

fn lstm_step(w: &LstmWeights, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> (StepCache, Vec<f64>, Vec<f64>) {
    let h = w.hidden();
    let mut z = w.bias.data().to_vec();
    w.w_input.matvec_add(x, &mut z);
    w.w_recurrent.matvec_add(h_prev, &mut z);
    for v in &mut z[..2 * h] {
        *v = sigmoid(*v);
    }
    for v in &mut z[2 * h..3 * h] {
        *v = libm::tanh(*v);
    }
    for v in &mut z[3 * h..] {
        *v = sigmoid(*v);
    }
    let mut c = vec![0.0; h];
    let mut tanh_c = vec![0.0; h];
    let mut h_out = vec![0.0; h];
    for k in 0..h {
        let (i, f, g, o) = (z[k], z[h + k], z[2 * h + k], z[3 * h + k]);
        c[k] = f * c_prev[k] + i * g;
        tanh_c[k] = libm::tanh(c[k]);
        h_out[k] = o * tanh_c[k];
    }
    let cache = StepCache {
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        gates: z,
        tanh_c,
    };
    (cache, h_out, c)
}

/// One LSTM step: `i, f, o = σ(·)`, `g = tanh(·)`, `c = f⊙c_prev + i⊙g`,
/// `h = o⊙tanh(c)`.
pub fn lstm_cell(
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    weights: &LstmWeights,
) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
    let h = weights.hidden();
    if x.len() != weights.input() || h_prev.len() != h || c_prev.len() != h {
        return Err(ModelError::Shape(format!(
            "lstm_cell: x={}, h={}, c={} against input={} hidden={h}",
            x.len(),
            h_prev.len(),
            c_prev.len(),
            weights.input()
        )));
    }
    let (_, h_out, c) = lstm_step(weights, x, h_prev, c_prev);
    Ok((h_out, c))
}

/// Runs one direction over `input`; steps are stored by time index.
fn run_direction(w: &LstmWeights, input: &Matrix, reverse: bool) -> (Vec<StepCache>, Matrix) {
    let t_len = input.rows();
    let h = w.hidden();
    let mut out = Matrix::zeros(t_len, h);
    let mut steps: Vec<Option<StepCache>> = vec![None; t_len];
    let mut h_prev = vec![0.0; h];
    let mut c_prev = vec![0.0; h];
    for k in 0..t_len {
        let t = if reverse { t_len - 1 - k } else { k };
        let (cache, h_t, c_t) = lstm_step(w, input.row(t), &h_prev, &c_prev);
        out.row_mut(t).copy_from_slice(&h_t);
        steps[t] = Some(cache);
        h_prev = h_t;
        c_prev = c_t;
    }
    (steps.into_iter().map(Option::unwrap).collect(), out)
}

#[derive(Debug, Clone)]
struct LayerCache {
    input: Matrix,
    forward: Vec<StepCache>,
    backward: Vec<StepCache>,
    /// Inverted-dropout mask applied to this layer's output.
    mask: Option<Matrix>,
}

/// Everything the backward pass needs for one instance.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    layers: Vec<LayerCache>,
    /// Final-layer states, `T × 2H`.
    pub states: Matrix,
    /// `tanh(W s_t)`, `T × A`.
    attn_hidden: Matrix,
    pub attention_weights: Vec<f64>,
    pub context: Vec<f64>,
    context_mask: Option<Vec<f64>>,
    /// Context after dropout, the classifier input.
    classifier_input: Vec<f64>,
    pub probs: Vec<f64>,
}

fn dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut SeededRng) -> Matrix {
    let keep = 1.0 - rate;
    let scale = 1.0 / keep;
    let data = (0..rows * cols)
        .map(|_| if rng.next_f64() < keep { scale } else { 0.0 })
        .collect();
    Matrix::from_vec(rows, cols, data)
}

fn hadamard(a: &Matrix, mask: &Matrix) -> Matrix {
    let data = a.data().iter().zip(mask.data()).map(|(x, m)| x * m).collect();
    Matrix::from_vec(a.rows(), a.cols(), data)
}

fn run_layers(
    embeddings: &Matrix,
    params: &ModelParams,
    mut dropout: Option<&mut SeededRng>,
) -> (Vec<LayerCache>, Matrix) {
    let rate = params.hyper.dropout;
    let h = params.hyper.hidden;
    let n_layers = params.layers.len();
    let mut caches = Vec::with_capacity(n_layers);
    let mut input = embeddings.clone();
    for (l, layer) in params.layers.iter().enumerate() {
        let (fwd_steps, fwd_out) = run_direction(&layer.forward, &input, false);
        let (bwd_steps, bwd_out) = run_direction(&layer.backward, &input, true);
        let t_len = input.rows();
        let mut out = Matrix::zeros(t_len, 2 * h);
        for t in 0..t_len {
            let row = out.row_mut(t);
            row[..h].copy_from_slice(fwd_out.row(t));
            row[h..].copy_from_slice(bwd_out.row(t));
        }
        let mask = match dropout.as_deref_mut() {
            Some(rng) if rate > 0.0 && l + 1 < n_layers => {
                Some(dropout_mask(t_len, 2 * h, rate, rng))
            }
            _ => None,
        };
        let next = match &mask {
            Some(m) => hadamard(&out, m),
            None => out.clone(),
        };
        caches.push(LayerCache {
            input,
            forward: fwd_steps,
            backward: bwd_steps,
            mask,
        });
        input = if l + 1 < n_layers { next } else { out };
    }
    (caches, input)
}

/// Stacked bidirectional LSTM over a `T × dim` input; returns `T × 2H`
/// states with the forward half first. Dropout between layers is only
/// applied when `dropout_active`.
pub fn bilstm_forward(
    embeddings: &Matrix,
    params: &ModelParams,
    dropout_active: bool,
    rng: &mut SeededRng,
) -> Result<Matrix, ModelError> {
    check_input(embeddings, params)?;
    let (_, states) = run_layers(embeddings, params, dropout_active.then_some(rng));
    Ok(states)
}

fn attend(states: &Matrix, params: &ModelParams) -> (Matrix, Vec<f64>, Vec<f64>) {
    let a_dim = params.hyper.attention_dim;
    let t_len = states.rows();
    let mut hidden = Matrix::zeros(t_len, a_dim);
    let mut scores = vec![0.0; t_len];
    for (t, score) in scores.iter_mut().enumerate() {
        let u = hidden.row_mut(t);
        params.attention_w.matvec_add(states.row(t), u);
        u.iter_mut().for_each(|x| *x = libm::tanh(*x));
        *score = dot(params.attention_v.data(), u);
    }
    let weights = softmax(&scores);
    let mut context = vec![0.0; states.cols()];
    for (t, &a) in weights.iter().enumerate() {
        axpy(a, states.row(t), &mut context);
    }
    (hidden, weights, context)
}

/// Additive attention: `score_t = v·tanh(W s_t)`, `weights = softmax`,
/// `context = Σ weights_t s_t`.
pub fn attention(states: &Matrix, params: &ModelParams) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
    if states.rows() == 0 || states.cols() != 2 * params.hyper.hidden {
        return Err(ModelError::Shape(format!(
            "attention over {:?} states, expected T×{}",
            states.shape(),
            2 * params.hyper.hidden
        )));
    }
    let (_, weights, context) = attend(states, params);
    Ok((context, weights))
}

fn check_input(embeddings: &Matrix, params: &ModelParams) -> Result<(), ModelError> {
    if embeddings.rows() == 0 {
        return Err(ModelError::EmptyInput);
    }
    if embeddings.cols() != params.hyper.input_dim {
        return Err(ModelError::Shape(format!(
            "input has {} columns, model expects {}",
            embeddings.cols(),
            params.hyper.input_dim
        )));
    }
    Ok(())
}

/// Full forward pass keeping intermediates. `dropout` enables training-mode
/// dropout with masks drawn from the given generator.
pub fn forward_cached(
    embeddings: &Matrix,
    params: &ModelParams,
    mut dropout: Option<&mut SeededRng>,
) -> Result<ForwardCache, ModelError> {
    check_input(embeddings, params)?;
    let (layers, states) = run_layers(embeddings, params, dropout.as_deref_mut());
    let (attn_hidden, attention_weights, context) = attend(&states, params);
    let rate = params.hyper.dropout;
    let context_mask = match dropout {
        Some(rng) if rate > 0.0 => Some(dropout_mask(1, context.len(), rate, rng).into_vec()),
        _ => None,
    };
    let classifier_input = match &context_mask {
        Some(m) => context.iter().zip(m).map(|(c, m)| c * m).collect(),
        None => context.clone(),
    };
    let mut logits = params.output_b.data().to_vec();
    params.output_w.matvec_add(&classifier_input, &mut logits);
    let probs = softmax(&logits);
    Ok(ForwardCache {
        layers,
        states,
        attn_hidden,
        attention_weights,
        context,
        context_mask,
        classifier_input,
        probs,
    })
}

/// Inference on an embedded sequence (dropout off).
pub fn predict_embedded(embeddings: &Matrix, params: &ModelParams) -> Result<Prediction, ModelError> {
    let cache = forward_cached(embeddings, params, None)?;
    Ok(Prediction::from_probs(cache.probs))
}

/// Backpropagates `scale · ∂(−ln p_gold)` into `grads`, returning the
/// unscaled loss of this instance.
pub fn backward(
    cache: &ForwardCache,
    params: &ModelParams,
    gold: Label,
    scale: f64,
    grads: &mut ModelParams,
) -> f64 {
    let h = params.hyper.hidden;
    let gold_idx = gold.index();
    let loss = -libm::log(cache.probs[gold_idx]);

    // classifier
    let mut d_logits: Vec<f64> = cache.probs.iter().map(|p| scale * p).collect();
    d_logits[gold_idx] -= scale;
    debug_assert_eq!(d_logits.len(), LABEL_COUNT);
    grads.output_w.add_outer(&d_logits, &cache.classifier_input);
    axpy(1.0, &d_logits, grads.output_b.data_mut());
    let mut d_context = vec![0.0; 2 * h];
    params.output_w.tr_matvec_add(&d_logits, &mut d_context);
    if let Some(mask) = &cache.context_mask {
        d_context.iter_mut().zip(mask).for_each(|(d, m)| *d *= m);
    }

    // attention
    let states = &cache.states;
    let t_len = states.rows();
    let weights = &cache.attention_weights;
    let d_weights: Vec<f64> = (0..t_len).map(|t| dot(&d_context, states.row(t))).collect();
    let mean_dw: f64 = weights.iter().zip(&d_weights).map(|(a, d)| a * d).sum();
    let mut d_states = Matrix::zeros(t_len, 2 * h);
    let v = params.attention_v.data();
    for t in 0..t_len {
        let d_score = weights[t] * (d_weights[t] - mean_dw);
        let u = cache.attn_hidden.row(t);
        axpy(d_score, u, grads.attention_v.data_mut());
        let d_pre: Vec<f64> = u
            .iter()
            .zip(v)
            .map(|(u, v)| d_score * v * (1.0 - u * u))
            .collect();
        grads.attention_w.add_outer(&d_pre, states.row(t));
        let ds = d_states.row_mut(t);
        axpy(weights[t], &d_context, ds);
        params.attention_w.tr_matvec_add(&d_pre, ds);
    }

    // stacked layers, top down
    let mut d_out = d_states;
    for l in (0..params.layers.len()).rev() {
        let lc = &cache.layers[l];
        if let Some(mask) = &lc.mask {
            d_out = hadamard(&d_out, mask);
        }
        let mut d_input = Matrix::zeros(lc.input.rows(), lc.input.cols());
        let layer = &params.layers[l];
        let glayer = &mut grads.layers[l];
        backprop_direction(&layer.forward, &mut glayer.forward, &lc.forward, &lc.input, &d_out, 0, false, &mut d_input);
        backprop_direction(&layer.backward, &mut glayer.backward, &lc.backward, &lc.input, &d_out, h, true, &mut d_input);
        d_out = d_input;
    }
    loss
}

/// BPTT for one direction. `d_out` holds gradients w.r.t. the layer output
/// and `offset` selects this direction's half.
#[allow(clippy::too_many_arguments)]
fn backprop_direction(
    w: &LstmWeights,
    g: &mut LstmWeights,
    steps: &[StepCache],
    input: &Matrix,
    d_out: &Matrix,
    offset: usize,
    reverse: bool,
    d_input: &mut Matrix,
) {
    let h = w.hidden();
    let t_len = steps.len();
    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];
    let mut dz = vec![0.0; 4 * h];
    // processing order reversed
    for k in (0..t_len).rev() {
        let t = if reverse { t_len - 1 - k } else { k };
        let s = &steps[t];
        let dh_row = &d_out.row(t)[offset..offset + h];
        for j in 0..h {
            let (i, f, gg, o) = (s.gates[j], s.gates[h + j], s.gates[2 * h + j], s.gates[3 * h + j]);
            let tc = s.tanh_c[j];
            let dh = dh_row[j] + dh_next[j];
            let d_o = dh * tc;
            let dc = dh * o * (1.0 - tc * tc) + dc_next[j];
            let d_i = dc * gg;
            let d_g = dc * i;
            let d_f = dc * s.c_prev[j];
            dc_next[j] = dc * f;
            dz[j] = d_i * i * (1.0 - i);
            dz[h + j] = d_f * f * (1.0 - f);
            dz[2 * h + j] = d_g * (1.0 - gg * gg);
            dz[3 * h + j] = d_o * o * (1.0 - o);
        }
        g.w_input.add_outer(&dz, input.row(t));
        g.w_recurrent.add_outer(&dz, &s.h_prev);
        axpy(1.0, &dz, g.bias.data_mut());
        w.w_input.tr_matvec_add(&dz, d_input.row_mut(t));
        dh_next.iter_mut().for_each(|x| *x = 0.0);
        w.w_recurrent.tr_matvec_add(&dz, &mut dh_next);
    }
}

/// Mean cross-entropy and its gradient over a batch of embedded instances.
pub fn batch_gradient(
    batch: &[(&Matrix, Label)],
    params: &ModelParams,
    mut dropout: Option<&mut SeededRng>,
) -> Result<(f64, ModelParams), ModelError> {
    if batch.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    let mut grads = params.zeros_like();
    let scale = 1.0 / batch.len() as f64;
    let mut total = 0.0;
    for (emb, gold) in batch {
        let cache = forward_cached(emb, params, dropout.as_deref_mut())?;
        total += backward(&cache, params, *gold, scale, &mut grads);
    }
    Ok((total * scale, grads))
}
