use motive_core::model::tensor::{sigmoid, softmax};
use motive_core::model::{
    attention, batch_gradient, bilstm_forward, forward_cached, lstm_cell, predict_embedded, train,
    Hyperparams, LabeledSequence, LstmWeights, Matrix, ModelParams, Optimizer, Sgd, TrainConfig,
};
use motive_core::synth::oracles::finite_difference_gradient;
use motive_core::synth::{generate, SynthSpec};
use motive_core::textprep::truncate_primacy;
use motive_core::{Label, SeededRng};

fn random_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.uniform(-1.0, 1.0)).collect())
}

fn small_model(seed: u64, hidden: usize, dim: usize, dropout: f64) -> ModelParams {
    let hyper = Hyperparams {
        input_dim: dim,
        hidden,
        layers: 3,
        attention_dim: 2 * hidden,
        dropout,
    };
    let mut rng = SeededRng::new(seed);
    let mut p = ModelParams::init(hyper, &mut rng).unwrap();
    // widen the init so every gate sees non-trivial gradients
    let flat: Vec<f64> = p.flatten().iter().map(|x| x * 2.0 + rng.uniform(-0.1, 0.1)).collect();
    p.set_flat(&flat);
    p
}

fn label(s: &str) -> Label {
    s.parse().unwrap()
}

/// Max over parameters of `|a − n| / max(|a|, |n|, floor)`. The floor keeps
/// the rounding noise of the difference quotient (~1e-11) from dominating
/// near-zero gradients.
fn max_relative_error(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| (a - n).abs() / a.abs().max(n.abs()).max(floor))
        .fold(0.0, f64::max)
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = SeededRng::new(11);
    let params = small_model(5, 4, 6, 0.0);
    let inputs = [random_matrix(5, 6, &mut rng), random_matrix(5, 6, &mut rng)];
    let batch = [(&inputs[0], label("M4")), (&inputs[1], label("A2"))];
    let (_, grads) = batch_gradient(&batch, &params, None).unwrap();
    let loss = |p: &ModelParams| {
        batch
            .iter()
            .map(|(x, g)| -predict_embedded(x, p).unwrap().probs[g.index()].ln())
            .sum::<f64>()
            / batch.len() as f64
    };
    let numeric = finite_difference_gradient(&params, loss, 1e-5);
    let err = max_relative_error(&grads.flatten(), &numeric, 1e-6);
    assert!(err < 1e-4, "max relative error {err:e}");
}

#[test]
fn dropout_gradient_matches_with_fixed_masks() {
    let mut rng = SeededRng::new(12);
    let params = small_model(6, 3, 4, 0.3);
    let x = random_matrix(4, 4, &mut rng);
    let (_, grads) = batch_gradient(&[(&x, label("F3"))], &params, Some(&mut SeededRng::new(99))).unwrap();
    // same seed reproduces the same masks inside the loss
    let loss = |p: &ModelParams| {
        let cache = forward_cached(&x, p, Some(&mut SeededRng::new(99))).unwrap();
        -cache.probs[label("F3").index()].ln()
    };
    let numeric = finite_difference_gradient(&params, loss, 1e-5);
    let err = max_relative_error(&grads.flatten(), &numeric, 1e-6);
    assert!(err < 1e-4, "max relative error {err:e}");
}

#[test]
fn loss_decreases_under_small_steps() {
    let mut rng = SeededRng::new(3);
    let params0 = small_model(8, 4, 6, 0.0);
    let inputs: Vec<Matrix> = (0..4).map(|_| random_matrix(5, 6, &mut rng)).collect();
    let golds = [label("M4"), label("A1"), label("00"), label("L5")];
    let batch: Vec<(&Matrix, Label)> = inputs.iter().zip(golds).collect();
    let mut params = params0;
    let mut opt = Sgd { learning_rate: 0.05 };
    let mut last = f64::INFINITY;
    for _ in 0..10 {
        let (loss, grads) = batch_gradient(&batch, &params, None).unwrap();
        assert!(loss < last, "loss {loss} did not drop below {last}");
        last = loss;
        opt.step(&mut params, &grads);
    }
}

#[test]
fn gradient_is_batch_order_invariant() {
    let mut rng = SeededRng::new(4);
    let params = small_model(9, 4, 6, 0.0);
    let inputs: Vec<Matrix> = (0..6).map(|i| random_matrix(2 + i, 6, &mut rng)).collect();
    let golds: Vec<Label> = (0..6).map(|i| Label::from_index(i * 5).unwrap()).collect();
    let batch: Vec<(&Matrix, Label)> = inputs.iter().zip(golds).collect();
    let mut reversed = batch.clone();
    reversed.reverse();
    let (la, ga) = batch_gradient(&batch, &params, None).unwrap();
    let (lb, gb) = batch_gradient(&reversed, &params, None).unwrap();
    assert!((la - lb).abs() < 1e-12);
    for (a, b) in ga.flatten().iter().zip(gb.flatten()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn lstm_cell_matches_scalar_formula() {
    let mut w = LstmWeights::zeros(1, 1);
    // gate rows: input, forget, candidate, output
    w.w_input.data_mut().copy_from_slice(&[0.5, -0.3, 0.8, 0.1]);
    w.w_recurrent.data_mut().copy_from_slice(&[0.2, 0.4, -0.6, 0.7]);
    w.bias.data_mut().copy_from_slice(&[0.1, 1.0, -0.2, 0.05]);
    let (x, h0, c0) = (0.9, -0.4, 0.3);
    let z = |k: usize| w.w_input.data()[k] * x + w.w_recurrent.data()[k] * h0 + w.bias.data()[k];
    let c = sigmoid(z(1)) * c0 + sigmoid(z(0)) * z(2).tanh();
    let h = sigmoid(z(3)) * c.tanh();
    let (h_out, c_out) = lstm_cell(&[x], &[h0], &[c0], &w).unwrap();
    assert!((h_out[0] - h).abs() < 1e-15);
    assert!((c_out[0] - c).abs() < 1e-15);
}

#[test]
fn saturated_gates_copy_the_candidate() {
    // i, o → 1 and f → 0 make c = tanh(candidate input), h = tanh(c)
    let mut w = LstmWeights::zeros(2, 2);
    for r in 0..2 {
        w.bias.data_mut()[r] = 60.0;
        w.bias.data_mut()[2 + r] = -60.0;
        w.bias.data_mut()[6 + r] = 60.0;
    }
    w.w_input.data_mut()[4 * 2] = 1.0;
    w.w_input.data_mut()[5 * 2 + 1] = 1.0;
    let x = [0.3, -0.7];
    let (h, c) = lstm_cell(&x, &[0.5, 0.5], &[9.0, -9.0], &w).unwrap();
    for k in 0..2 {
        assert!((c[k] - x[k].tanh()).abs() < 1e-12);
        assert!((h[k] - c[k].tanh()).abs() < 1e-12);
    }
}

#[test]
fn mirrored_directions_on_palindromes() {
    // one layer: above it the two halves arrive swapped at mirrored steps
    let hyper = Hyperparams {
        layers: 1,
        dropout: 0.0,
        ..Hyperparams::new(4, 3)
    };
    let mut p = ModelParams::init(hyper, &mut SeededRng::new(21)).unwrap();
    for layer in &mut p.layers {
        layer.backward = layer.forward.clone();
    }
    let mut rng = SeededRng::new(2);
    let half = random_matrix(3, 4, &mut rng);
    let rows: Vec<&[f64]> = vec![half.row(0), half.row(1), half.row(2), half.row(1), half.row(0)];
    let x = Matrix::from_rows(&rows);
    let states = bilstm_forward(&x, &p, false, &mut rng).unwrap();
    let t = states.rows();
    for i in 0..t {
        let fwd = &states.row(i)[..3];
        let mirrored = &states.row(t - 1 - i)[3..];
        for k in 0..3 {
            assert!((fwd[k] - mirrored[k]).abs() < 1e-14);
        }
    }
}

#[test]
fn attention_weights_form_a_distribution() {
    let mut rng = SeededRng::new(31);
    let p = small_model(1, 4, 6, 0.0);
    for t_len in 1..12 {
        let x = random_matrix(t_len, 6, &mut rng);
        let states = bilstm_forward(&x, &p, false, &mut rng).unwrap();
        let (context, weights) = attention(&states, &p).unwrap();
        assert_eq!(weights.len(), t_len);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(weights.iter().all(|&w| w > 0.0));
        // the context lies in the per-coordinate hull of the states
        for (k, &c) in context.iter().enumerate() {
            let col: Vec<f64> = (0..t_len).map(|t| states.get(t, k)).collect();
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(c >= lo - 1e-12 && c <= hi + 1e-12);
        }
    }
    let one = random_matrix(1, 6, &mut rng);
    let states = bilstm_forward(&one, &p, false, &mut rng).unwrap();
    assert_eq!(attention(&states, &p).unwrap().1, vec![1.0]);
}

#[test]
fn attention_ignores_constant_score_shift() {
    let probs = softmax(&[1.0, 2.0, 3.0]);
    let shifted = softmax(&[101.0, 102.0, 103.0]);
    for (a, b) in probs.iter().zip(&shifted) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn training_is_deterministic() {
    let labels: Vec<Label> = ["A1", "M4", "F2"].iter().map(|s| label(s)).collect();
    let spec = SynthSpec::uniform(&labels, 2, 10, (2, 6), 17).unwrap();
    let table = spec.embeddings(8, 17);
    let data: Vec<LabeledSequence> = generate(&spec, 60)
        .unwrap()
        .into_iter()
        .map(|i| LabeledSequence {
            tokens: truncate_primacy(i.tokens, 20),
            label: i.label,
        })
        .collect();
    let config = TrainConfig {
        hidden: 4,
        layers: 2,
        max_epochs: 2,
        batch_size: 8,
        seed: 5,
        ..TrainConfig::default()
    };
    let a = train(&data, &config, &table).unwrap();
    let b = train(&data, &config, &table).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.log, b.log);
    let c = train(&data, &TrainConfig { seed: 6, ..config }, &table).unwrap();
    assert_ne!(a.params, c.params);
}

#[test]
fn zero_learning_rate_keeps_initial_parameters() {
    let labels = [label("A1"), label("M4")];
    let spec = SynthSpec::uniform(&labels, 2, 10, (2, 6), 1).unwrap();
    let table = spec.embeddings(5, 1);
    let data: Vec<LabeledSequence> = generate(&spec, 40)
        .unwrap()
        .into_iter()
        .map(|i| LabeledSequence {
            tokens: truncate_primacy(i.tokens, 20),
            label: i.label,
        })
        .collect();
    let config = TrainConfig {
        hidden: 3,
        layers: 1,
        max_epochs: 1,
        learning_rate: 0.0,
        seed: 2,
        ..TrainConfig::default()
    };
    let out = train(&data, &config, &table).unwrap();
    let mut rng = SeededRng::new(2);
    let init = ModelParams::init(config.hyperparams(5), &mut rng).unwrap();
    assert_eq!(out.params, init);
}
