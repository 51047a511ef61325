//! Neural Cox model: a feed-forward network emits a scalar log-risk, trained
//! by minimizing the negative Breslow partial log-likelihood with seeded
//! initialization and a monotone adaptive-step gradient descent.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::metrics::RiskScorer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Activation {
    #[default]
    Rectifier,
    Tanh,
}

impl Activation {
    fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Rectifier => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        match self {
            Activation::Rectifier => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - z.tanh().powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    /// Hidden layer widths; empty means a single affine map (linear model).
    pub hidden_sizes: Vec<usize>,
    pub activation: Activation,
    /// L2 penalty on weight matrices (biases stay free).
    pub weight_decay: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            hidden_sizes: vec![16, 16],
            activation: Activation::Rectifier,
            weight_decay: 1e-4,
            learning_rate: 1e-2,
            epochs: 2000,
            seed: 0,
        }
    }
}

/// Materialized layer view used by artifacts and inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Row-major (output × input).
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepSurvModel {
    pub spec: NetworkSpec,
    pub feature_names: Vec<String>,
    pub training_loss_trace: Vec<f64>,
    /// Flat parameter vector: per layer, weights row-major then bias.
    params: Vec<f64>,
    /// (output, input) per layer.
    shapes: Vec<(usize, usize)>,
}

fn layer_shapes(p: usize, hidden: &[usize]) -> Vec<(usize, usize)> {
    let mut shapes = Vec::with_capacity(hidden.len() + 1);
    let mut fan_in = p;
    for &width in hidden {
        shapes.push((width, fan_in));
        fan_in = width;
    }
    shapes.push((1, fan_in));
    shapes
}

fn param_count(shapes: &[(usize, usize)]) -> usize {
    shapes.iter().map(|(o, i)| o * i + o).sum()
}

/// Per-row backpropagation record: layer inputs and pre-activation values.
type Tape = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Forward pass through flat parameters, optionally recording pre-activation
/// values and layer inputs for backpropagation.
fn forward_flat(
    params: &[f64],
    shapes: &[(usize, usize)],
    act: Activation,
    x: &[f64],
    mut tape: Option<&mut Tape>,
) -> f64 {
    let mut a: Vec<f64> = x.to_vec();
    let mut offset = 0;
    let last = shapes.len() - 1;
    for (l, &(out, inp)) in shapes.iter().enumerate() {
        if let Some(t) = tape.as_deref_mut() {
            t.0.push(a.clone());
        }
        let mut z = vec![0.0; out];
        for o in 0..out {
            let row = &params[offset + o * inp..offset + (o + 1) * inp];
            let b = params[offset + out * inp + o];
            z[o] = b + row.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>();
        }
        offset += out * inp + out;
        if let Some(t) = tape.as_deref_mut() {
            t.1.push(z.clone());
        }
        a = if l == last {
            z
        } else {
            z.iter().map(|v| act.apply(*v)).collect()
        };
    }
    a[0]
}

/// Negative Breslow partial log-likelihood of the batch's risk scores, with
/// its analytic gradient. Scores are centred by their maximum before
/// exponentiation.
pub fn cox_loss(etas: &[f64], times: &[f64], status: &[bool]) -> Result<(f64, Vec<f64>)> {
    let n = etas.len();
    if times.len() != n || status.len() != n {
        return Err(Error::Argument("etas, times and status must share a length".into()));
    }
    if !status.iter().any(|s| *s) {
        return Err(Error::NoEvents);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| times[b].partial_cmp(&times[a]).unwrap());

    let eta_max = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = etas.iter().map(|e| (e - eta_max).exp()).collect();

    let mut loss = 0.0;
    let mut grad = vec![0.0; n];
    let mut s_risk = 0.0;
    let mut cum_coef = 0.0;
    // snapshot of cum_coef at each row's insertion; the difference to the
    // final value multiplies that row's weight in the gradient
    let mut snapshot = vec![0.0; n];

    let mut pos = 0;
    while pos < n {
        let t = times[order[pos]];
        let mut d = 0usize;
        let mut eta_sum = 0.0;
        while pos < n && times[order[pos]] == t {
            let i = order[pos];
            s_risk += weights[i];
            snapshot[i] = cum_coef;
            if status[i] {
                d += 1;
                eta_sum += etas[i];
                grad[i] -= 1.0;
            }
            pos += 1;
        }
        if d > 0 {
            loss += d as f64 * (s_risk.ln() + eta_max) - eta_sum;
            cum_coef += d as f64 / s_risk;
        }
    }
    for i in 0..n {
        grad[i] += weights[i] * (cum_coef - snapshot[i]);
    }
    Ok((loss, grad))
}

/// Training objective: cox_loss over the batch plus weight decay, with the
/// flat parameter gradient from backpropagation.
fn objective_flat(
    params: &[f64],
    shapes: &[(usize, usize)],
    spec: &NetworkSpec,
    xs: &[Vec<f64>],
    times: &[f64],
    status: &[bool],
) -> Result<(f64, Vec<f64>)> {
    let n = xs.len();
    let mut etas = vec![0.0; n];
    let mut tapes: Vec<Tape> = Vec::with_capacity(n);
    for (i, x) in xs.iter().enumerate() {
        let mut tape = (Vec::new(), Vec::new());
        etas[i] = forward_flat(params, shapes, spec.activation, x, Some(&mut tape));
        tapes.push(tape);
    }
    let (mut loss, d_etas) = cox_loss(&etas, times, status)?;
    let mut grad = vec![0.0; params.len()];

    for (i, tape) in tapes.iter().enumerate() {
        let (inputs, zs) = tape;
        // delta starts as the scalar dLoss/d_eta at the output layer
        let mut delta = vec![d_etas[i]];
        for l in (0..shapes.len()).rev() {
            let (out, inp) = shapes[l];
            let offset: usize = shapes[..l].iter().map(|(o, i)| o * i + o).sum();
            let a_in = &inputs[l];
            // accumulate weight and bias gradients
            for o in 0..out {
                for k in 0..inp {
                    grad[offset + o * inp + k] += delta[o] * a_in[k];
                }
                grad[offset + out * inp + o] += delta[o];
            }
            if l == 0 {
                break;
            }
            // propagate through the previous activation
            let mut prev = vec![0.0; inp];
            for k in 0..inp {
                let mut sum = 0.0;
                for o in 0..out {
                    sum += params[offset + o * inp + k] * delta[o];
                }
                prev[k] = sum * spec.activation.derivative(zs[l - 1][k]);
            }
            delta = prev;
        }
    }

    if spec.weight_decay > 0.0 {
        let mut offset = 0;
        for &(out, inp) in shapes {
            for idx in offset..offset + out * inp {
                loss += spec.weight_decay * params[idx] * params[idx];
                grad[idx] += 2.0 * spec.weight_decay * params[idx];
            }
            offset += out * inp + out;
        }
    }
    Ok((loss, grad))
}

/// Trains the network by full-batch gradient descent along an RMS-scaled
/// direction with a backtracking step, so the recorded loss trace never
/// increases. Deterministic for a fixed spec and dataset.
pub fn fit_deepsurv(train: &SurvivalDataset, spec: &NetworkSpec) -> Result<DeepSurvModel> {
    if train.n_events() < 2 {
        return Err(Error::Validation("fitting needs at least 2 events".into()));
    }
    if spec.epochs == 0 || spec.hidden_sizes.contains(&0) {
        return Err(Error::Argument("epochs and layer widths must be ≥ 1".into()));
    }
    if spec.learning_rate <= 0.0 || spec.learning_rate.is_nan() {
        return Err(Error::Argument("learning_rate must be positive".into()));
    }
    train.require_complete_covariates()?;

    let p = train.p();
    let shapes = layer_shapes(p, &spec.hidden_sizes);
    let mut rng = StdRng::seed_from_u64(spec.seed);
    let mut params = vec![0.0; param_count(&shapes)];
    let mut offset = 0;
    for &(out, inp) in &shapes {
        let bound = (6.0 / inp as f64).sqrt();
        for w in params.iter_mut().skip(offset).take(out * inp) {
            *w = rng.gen_range(-bound..bound);
        }
        offset += out * inp + out; // biases start at zero
    }

    let xs: Vec<Vec<f64>> = train.rows().iter().map(|r| r.x.clone()).collect();
    let times = train.times_f64();
    let status = train.statuses();

    let (mut loss, mut grad) = objective_flat(&params, &shapes, spec, &xs, &times, &status)?;
    if !loss.is_finite() {
        return Err(Error::Diverged("training diverged; reduce learning_rate".into()));
    }
    let mut trace = Vec::with_capacity(spec.epochs);
    let mut rms = vec![0.0; params.len()];
    let mut step = 1.0;

    for _ in 0..spec.epochs {
        for (v, g) in rms.iter_mut().zip(&grad) {
            *v = 0.9 * *v + 0.1 * g * g;
        }
        let direction: Vec<f64> = grad
            .iter()
            .zip(&rms)
            .map(|(g, v)| g / (v.sqrt() + 1e-8))
            .collect();

        let mut accepted = false;
        for _ in 0..30 {
            let alpha = step * spec.learning_rate;
            let candidate: Vec<f64> = params
                .iter()
                .zip(&direction)
                .map(|(p, d)| p - alpha * d)
                .collect();
            let (cand_loss, cand_grad) =
                objective_flat(&candidate, &shapes, spec, &xs, &times, &status)?;
            if cand_loss.is_finite() && cand_loss <= loss {
                params = candidate;
                loss = cand_loss;
                grad = cand_grad;
                step = (step * 1.25).min(100.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        trace.push(loss);
        if !accepted && step * spec.learning_rate < 1e-14 {
            break;
        }
    }

    Ok(DeepSurvModel {
        spec: spec.clone(),
        feature_names: train.feature_names().to_vec(),
        training_loss_trace: trace,
        params,
        shapes,
    })
}

impl DeepSurvModel {
    /// Scalar log-risk η(x).
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_names.len() {
            return Err(Error::Argument(format!(
                "covariate vector has length {}, model expects {}",
                x.len(),
                self.feature_names.len()
            )));
        }
        Ok(forward_flat(&self.params, &self.shapes, self.spec.activation, x, None))
    }

    /// Alias of [`forward`](Self::forward); the network output is the risk.
    pub fn risk_score(&self, x: &[f64]) -> Result<f64> {
        self.forward(x)
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Training objective and flat parameter gradient at the current weights;
    /// the probe surface used by gradient diagnostics.
    pub fn objective(&self, ds: &SurvivalDataset) -> Result<(f64, Vec<f64>)> {
        let xs: Vec<Vec<f64>> = ds.rows().iter().map(|r| r.x.clone()).collect();
        objective_flat(
            &self.params,
            &self.shapes,
            &self.spec,
            &xs,
            &ds.times_f64(),
            &ds.statuses(),
        )
    }

    /// Copy of the model with one flat parameter shifted by `delta`.
    pub fn nudged(&self, index: usize, delta: f64) -> DeepSurvModel {
        let mut clone = self.clone();
        clone.params[index] += delta;
        clone
    }

    /// Layer view (weights row-major, then bias), for artifacts.
    pub fn layers(&self) -> Vec<Layer> {
        let mut layers = Vec::with_capacity(self.shapes.len());
        let mut offset = 0;
        for &(out, inp) in &self.shapes {
            let weights: Vec<Vec<f64>> = (0..out)
                .map(|o| self.params[offset + o * inp..offset + (o + 1) * inp].to_vec())
                .collect();
            let bias = self.params[offset + out * inp..offset + out * inp + out].to_vec();
            layers.push(Layer { weights, bias });
            offset += out * inp + out;
        }
        layers
    }

    /// Rebuilds a model from a layer list (artifact loading).
    pub fn from_layers(
        spec: NetworkSpec,
        feature_names: Vec<String>,
        layers: &[Layer],
    ) -> Result<DeepSurvModel> {
        let p = feature_names.len();
        let shapes = layer_shapes(p, &spec.hidden_sizes);
        if layers.len() != shapes.len() {
            return Err(Error::Argument("layer count does not match the spec".into()));
        }
        let mut params = Vec::with_capacity(param_count(&shapes));
        for (layer, &(out, inp)) in layers.iter().zip(&shapes) {
            if layer.weights.len() != out || layer.bias.len() != out {
                return Err(Error::Argument("layer shape mismatch".into()));
            }
            for row in &layer.weights {
                if row.len() != inp {
                    return Err(Error::Argument("layer shape mismatch".into()));
                }
                params.extend_from_slice(row);
            }
            params.extend_from_slice(&layer.bias);
        }
        Ok(DeepSurvModel {
            spec,
            feature_names,
            training_loss_trace: Vec::new(),
            params,
            shapes,
        })
    }
}

impl RiskScorer for DeepSurvModel {
    fn risk(&self, x: &[f64]) -> f64 {
        self.forward(x).expect("dimension mismatch in risk scoring")
    }
}
