//! Three-layer sigmoid perceptron trained with online backpropagation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Input, hidden and output layer, fully connected, sigmoid everywhere.
///
/// `w1` is `n_hidden x (n_in + 1)` and `w2` is `n_out x (n_hidden + 1)`; the
/// last column of each holds the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub n_in: usize,
    pub n_hidden: usize,
    pub n_out: usize,
    pub w1: Matrix,
    pub w2: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 500,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::param("epochs must be at least 1"));
        }
        Ok(())
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Random network with weights uniform on `[-0.5, 0.5)` and zero biases.
///
/// Non-bias weights are drawn row by row, all of `w1` before `w2`, from
/// [`Rng`] seeded with `seed`.
pub fn mlp_init(n_in: usize, n_hidden: usize, n_out: usize, seed: u64) -> Result<Mlp> {
    if n_in == 0 || n_hidden == 0 || n_out == 0 {
        return Err(Error::param(format!(
            "layer sizes must be positive, got {n_in}-{n_hidden}-{n_out}"
        )));
    }
    let mut rng = Rng::new(seed);
    let mut layer = |rows: usize, fan_in: usize| {
        Matrix::from_fn(rows, fan_in + 1, |_, j| {
            if j == fan_in {
                0.0
            } else {
                rng.uniform(-0.5, 0.5)
            }
        })
    };
    let w1 = layer(n_hidden, n_in);
    let w2 = layer(n_out, n_hidden);
    Ok(Mlp {
        n_in,
        n_hidden,
        n_out,
        w1,
        w2,
    })
}

impl Mlp {
    /// Checks that the weight shapes agree with the layer sizes.
    pub fn validate(&self) -> Result<()> {
        if self.n_in == 0 || self.n_hidden == 0 || self.n_out == 0 {
            return Err(Error::Configuration(format!(
                "layer sizes must be positive, got {}-{}-{}",
                self.n_in, self.n_hidden, self.n_out
            )));
        }
        if self.w1.shape() != (self.n_hidden, self.n_in + 1)
            || self.w2.shape() != (self.n_out, self.n_hidden + 1)
        {
            return Err(Error::Configuration(format!(
                "weights {}x{} / {}x{} do not match a {}-{}-{} network",
                self.w1.rows(),
                self.w1.cols(),
                self.w2.rows(),
                self.w2.cols(),
                self.n_in,
                self.n_hidden,
                self.n_out
            )));
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_in {
            return Err(Error::shape(format!(
                "network expects {} inputs, got {}",
                self.n_in,
                x.len()
            )));
        }
        Ok(())
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        affine_sigmoid(&self.w1, x)
    }

    fn output(&self, h: &[f64]) -> Vec<f64> {
        affine_sigmoid(&self.w2, h)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.output(&self.hidden(x)))
    }

    /// `0.5 * ||forward(x) - t||²`.
    pub fn loss(&self, x: &[f64], t: &[f64]) -> Result<f64> {
        let y = self.forward(x)?;
        self.check_target(t)?;
        Ok(half_squared_error(&y, t))
    }

    fn check_target(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.n_out {
            return Err(Error::shape(format!(
                "network has {} outputs, target has {}",
                self.n_out,
                t.len()
            )));
        }
        Ok(())
    }

    /// Analytic gradients of the loss with respect to `w1` and `w2`.
    pub fn gradients(&self, x: &[f64], t: &[f64]) -> Result<(Matrix, Matrix)> {
        self.check_input(x)?;
        self.check_target(t)?;
        let h = self.hidden(x);
        let y = self.output(&h);
        let (delta_o, delta_h) = self.deltas(&h, &y, t);
        let g2 = Matrix::from_fn(self.n_out, self.n_hidden + 1, |k, j| {
            delta_o[k] * h.get(j).copied().unwrap_or(1.0)
        });
        let g1 = Matrix::from_fn(self.n_hidden, self.n_in + 1, |j, i| {
            delta_h[j] * x.get(i).copied().unwrap_or(1.0)
        });
        Ok((g1, g2))
    }

    fn deltas(&self, h: &[f64], y: &[f64], t: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let delta_o: Vec<f64> = y
            .iter()
            .zip(t)
            .map(|(&yk, &tk)| (yk - tk) * yk * (1.0 - yk))
            .collect();
        let delta_h = (0..self.n_hidden)
            .map(|j| {
                let back: f64 = (0..self.n_out).map(|k| self.w2[(k, j)] * delta_o[k]).sum();
                back * h[j] * (1.0 - h[j])
            })
            .collect();
        (delta_o, delta_h)
    }

    /// One online gradient step on a single sample.
    fn step(&mut self, x: &[f64], t: &[f64], lr: f64) {
        let h = self.hidden(x);
        let y = self.output(&h);
        let (delta_o, delta_h) = self.deltas(&h, &y, t);
        for (k, &dk) in delta_o.iter().enumerate() {
            if dk == 0.0 {
                continue;
            }
            for j in 0..self.n_hidden {
                self.w2[(k, j)] -= lr * dk * h[j];
            }
            self.w2[(k, self.n_hidden)] -= lr * dk;
        }
        for (j, &dj) in delta_h.iter().enumerate() {
            if dj == 0.0 {
                continue;
            }
            for i in 0..self.n_in {
                self.w1[(j, i)] -= lr * dj * x[i];
            }
            self.w1[(j, self.n_in)] -= lr * dj;
        }
    }
}

fn affine_sigmoid(w: &Matrix, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..w.rows())
        .map(|r| {
            let row = w.row(r);
            let z: f64 = row[..n].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + row[n];
            sigmoid(z)
        })
        .collect()
}

fn half_squared_error(y: &[f64], t: &[f64]) -> f64 {
    0.5 * y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// Forward pass; free-function form of [`Mlp::forward`].
pub fn mlp_forward(m: &Mlp, x: &[f64]) -> Result<Vec<f64>> {
    m.forward(x)
}

/// Trains a copy of `m` with per-sample gradient descent on `0.5 * ||y - t||²`.
///
/// Returns the trained network and, for each epoch, the mean loss over the
/// whole set measured after that epoch's updates.
pub fn mlp_train(
    m: &Mlp,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<(Mlp, Vec<f64>)> {
    cfg.validate()?;
    m.validate()?;
    if inputs.is_empty() {
        return Err(Error::EmptyDataset("no training samples".into()));
    }
    if inputs.len() != targets.len() {
        return Err(Error::shape(format!(
            "{} inputs but {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    for (i, (x, t)) in inputs.iter().zip(targets).enumerate() {
        if x.len() != m.n_in || t.len() != m.n_out {
            return Err(Error::shape(format!(
                "sample {i}: input length {} / target length {}, network is {}-{}-{}",
                x.len(),
                t.len(),
                m.n_in,
                m.n_hidden,
                m.n_out
            )));
        }
        if x.iter().chain(t).any(|v| !v.is_finite()) {
            return Err(Error::param(format!("sample {i} has a non-finite value")));
        }
    }

    let mut net = m.clone();
    let mut rng = Rng::new(cfg.seed);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        if cfg.shuffle {
            rng.shuffle(&mut order);
        }
        for &i in &order {
            net.step(&inputs[i], &targets[i], cfg.learning_rate);
        }
        let total: f64 = inputs
            .iter()
            .zip(targets)
            .map(|(x, t)| half_squared_error(&net.output(&net.hidden(x)), t))
            .sum();
        history.push(total / inputs.len() as f64);
    }
    if net
        .w1
        .as_slice()
        .iter()
        .chain(net.w2.as_slice())
        .any(|v| !v.is_finite())
    {
        return Err(Error::param("training diverged to non-finite weights"));
    }
    Ok((net, history))
}

/// Largest relative error between the analytic gradient and a central finite
/// difference `(f(w + eps) - f(w - eps)) / (2 eps)`, over every weight.
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn mlp_gradient_check(m: &Mlp, x: &[f64], t: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::param(format!("eps must be in (0, 0.01], got {eps}")));
    }
    m.validate()?;
    let (g1, g2) = m.gradients(x, t)?;
    let mut worst = 0.0f64;
    let mut probe = m.clone();
    for layer in 0..2 {
        let analytic = if layer == 0 { &g1 } else { &g2 };
        let (rows, cols) = analytic.shape();
        for r in 0..rows {
            for c in 0..cols {
                let orig = *weight_mut(&mut probe, layer, r, c);
                *weight_mut(&mut probe, layer, r, c) = orig + eps;
                let plus = probe.loss(x, t)?;
                *weight_mut(&mut probe, layer, r, c) = orig - eps;
                let minus = probe.loss(x, t)?;
                *weight_mut(&mut probe, layer, r, c) = orig;
                let numeric = (plus - minus) / (2.0 * eps);
                let a = analytic[(r, c)];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                worst = worst.max(rel);
            }
        }
    }
    Ok(worst)
}

fn weight_mut(m: &mut Mlp, layer: usize, r: usize, c: usize) -> &mut f64 {
    if layer == 0 {
        &mut m.w1[(r, c)]
    } else {
        &mut m.w2[(r, c)]
    }
}
