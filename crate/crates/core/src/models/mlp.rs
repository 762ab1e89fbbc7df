//! Fully connected ReLU network with a softmax output, trained with Adam on
//! mean cross-entropy.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::optim::{sparse_rows, AdamConfig, Moments};
use super::{Encoded, MlpParams};
use crate::util::{rng, softmax_in_place};

/// Layer widths plus optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    pub input_dim: usize,
    pub output_dim: usize,
    #[serde(flatten)]
    pub params: MlpParams,
}

impl MlpArchitecture {
    /// One hidden layer of 100 units.
    pub fn nn_shallow(input_dim: usize, output_dim: usize) -> Self {
        MlpArchitecture { input_dim, output_dim, params: MlpParams::nn_shallow() }
    }

    /// Three hidden layers of 250 units.
    pub fn ffdl(input_dim: usize, output_dim: usize) -> Self {
        MlpArchitecture { input_dim, output_dim, params: MlpParams::ffdl() }
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_dim];
        w.extend(&self.params.hidden);
        w.push(self.output_dim);
        w
    }

    pub fn parameter_count(&self) -> usize {
        self.widths().windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct Layer {
    inputs: usize,
    outputs: usize,
    /// Row-major `outputs × inputs`.
    w: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
    /// Mean training loss after each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Gradients with the same shapes as the network's weights and biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Mlp {
    /// He-normal weights, zero biases.
    pub fn init(arch: &MlpArchitecture, seed: u64) -> Self {
        let mut r = rng(seed);
        let layers = arch
            .widths()
            .windows(2)
            .map(|w| {
                let normal = Normal::new(0.0, (2.0 / w[0] as f64).sqrt()).expect("positive std");
                Layer {
                    inputs: w[0],
                    outputs: w[1],
                    w: (0..w[0] * w[1]).map(|_| normal.sample(&mut r)).collect(),
                    b: vec![0.0; w[1]],
                }
            })
            .collect();
        Mlp { layers, epoch_losses: Vec::new() }
    }

    /// All weights and biases set to zero.
    pub fn zeros(arch: &MlpArchitecture) -> Self {
        let layers = arch
            .widths()
            .windows(2)
            .map(|w| Layer { inputs: w[0], outputs: w[1], w: vec![0.0; w[0] * w[1]], b: vec![0.0; w[1]] })
            .collect();
        Mlp { layers, epoch_losses: Vec::new() }
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.layers[layer].w
    }

    pub fn biases_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.layers[layer].b
    }

    /// Activations of every layer for one input; the last entry is the
    /// softmax output.
    fn forward(&self, x: &[(usize, f64)]) -> Vec<Vec<f64>> {
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.b.clone();
            if l == 0 {
                for (o, zo) in z.iter_mut().enumerate() {
                    let row = &layer.w[o * layer.inputs..(o + 1) * layer.inputs];
                    *zo += x.iter().map(|&(j, v)| row[j] * v).sum::<f64>();
                }
            } else {
                let prev = &acts[l - 1];
                for (o, zo) in z.iter_mut().enumerate() {
                    let row = &layer.w[o * layer.inputs..(o + 1) * layer.inputs];
                    *zo += row.iter().zip(prev).map(|(w, a)| w * a).sum::<f64>();
                }
            }
            if l + 1 == self.layers.len() {
                softmax_in_place(&mut z);
            } else {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(z);
        }
        acts
    }

    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let sparse: Vec<(usize, f64)> = x.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
        self.forward(&sparse).pop().expect("at least one layer")
    }

    fn zero_grads(&self) -> Gradients {
        Gradients {
            weights: self.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            biases: self.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
        }
    }

    /// Accumulates the gradient of one sample's cross-entropy into `g`;
    /// returns that loss.
    fn backward(&self, x: &[(usize, f64)], y: usize, g: &mut Gradients) -> f64 {
        let acts = self.forward(x);
        let last = self.layers.len() - 1;
        let loss = -acts[last][y].max(f64::MIN_POSITIVE).ln();
        let mut delta = acts[last].clone();
        delta[y] -= 1.0;
        for l in (0..=last).rev() {
            let layer = &self.layers[l];
            for (o, d) in delta.iter().enumerate() {
                g.biases[l][o] += d;
            }
            let gw = &mut g.weights[l];
            if l == 0 {
                for (o, d) in delta.iter().enumerate() {
                    if *d != 0.0 {
                        for &(j, v) in x {
                            gw[o * layer.inputs + j] += d * v;
                        }
                    }
                }
                break;
            }
            let prev = &acts[l - 1];
            let mut next = vec![0.0; layer.inputs];
            for (o, d) in delta.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                let row = &layer.w[o * layer.inputs..(o + 1) * layer.inputs];
                let grow = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                for j in 0..layer.inputs {
                    grow[j] += d * prev[j];
                    next[j] += d * row[j];
                }
            }
            for (n, a) in next.iter_mut().zip(prev) {
                if *a <= 0.0 {
                    *n = 0.0;
                }
            }
            delta = next;
        }
        loss
    }

    /// Mean cross-entropy over a batch.
    pub fn loss(&self, x: &[Vec<f64>], y: &[usize]) -> f64 {
        x.iter().zip(y).map(|(r, &c)| -self.proba(r)[c].max(f64::MIN_POSITIVE).ln()).sum::<f64>() / x.len() as f64
    }

    /// Analytic gradient of the mean cross-entropy over a batch.
    pub fn gradients(&self, x: &[Vec<f64>], y: &[usize]) -> Gradients {
        let rows = sparse_rows(x);
        let mut g = self.zero_grads();
        for (r, &c) in rows.iter().zip(y) {
            self.backward(r, c, &mut g);
        }
        let s = 1.0 / x.len() as f64;
        g.weights.iter_mut().chain(g.biases.iter_mut()).flatten().for_each(|v| *v *= s);
        g
    }

    pub(crate) fn fit(p: &MlpParams, x: &[Vec<f64>], data: &Encoded, seed: u64) -> Self {
        let arch = MlpArchitecture { input_dim: x[0].len(), output_dim: data.n_classes, params: p.clone() };
        let mut net = Mlp::init(&arch, seed);
        let mut r = rng(seed.wrapping_add(1));
        let rows = sparse_rows(x);
        let cfg = AdamConfig { lr: p.learning_rate, beta1: p.beta1, beta2: p.beta2, epsilon: p.epsilon };
        let mut mw: Vec<Moments> = net.layers.iter().map(|l| Moments::new(l.w.len())).collect();
        let mut mb: Vec<Moments> = net.layers.iter().map(|l| Moments::new(l.b.len())).collect();
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut t = 0u64;
        for _ in 0..p.epochs {
            order.shuffle(&mut r);
            let mut total = 0.0;
            for batch in order.chunks(p.batch_size) {
                let mut g = net.zero_grads();
                for &i in batch {
                    total += net.backward(&rows[i], data.y[i], &mut g);
                }
                let s = 1.0 / batch.len() as f64;
                t += 1;
                for (l, layer) in net.layers.iter_mut().enumerate() {
                    g.weights[l].iter_mut().for_each(|v| *v *= s);
                    g.biases[l].iter_mut().for_each(|v| *v *= s);
                    mw[l].step(&cfg, t, &mut layer.w, &g.weights[l]);
                    mb[l].step(&cfg, t, &mut layer.b, &g.biases[l]);
                }
            }
            net.epoch_losses.push(total / x.len() as f64);
        }
        net
    }
}

/// Largest relative error between analytic and central-difference
/// gradients: `|a - n| / max(|a| + |n|, 1e-6)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientCheck {
    pub max_relative_error: f64,
    pub parameters_checked: usize,
}

impl GradientCheck {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_relative_error < tolerance
    }
}

/// Checks every parameter of a He-initialized network with step `1e-5`.
pub fn gradient_check(arch: &MlpArchitecture, x: &[Vec<f64>], y: &[usize], seed: u64) -> GradientCheck {
    gradient_check_with_step(arch, x, y, seed, 1e-5)
}

pub fn gradient_check_with_step(
    arch: &MlpArchitecture,
    x: &[Vec<f64>],
    y: &[usize],
    seed: u64,
    step: f64,
) -> GradientCheck {
    let mut net = Mlp::init(arch, seed);
    // small non-zero biases so the check also covers them away from zero
    let mut r = rng(seed ^ 0x5eed);
    let normal = Normal::new(0.0, 0.1).expect("valid");
    for l in &mut net.layers {
        l.b.iter_mut().for_each(|b| *b = normal.sample(&mut r));
    }
    let analytic = net.gradients(x, y);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let rel = |a: f64, n: f64| (a - n).abs() / (a.abs() + n.abs()).max(1e-6);
    for l in 0..net.layers.len() {
        for i in 0..net.layers[l].w.len() {
            let orig = net.layers[l].w[i];
            net.layers[l].w[i] = orig + step;
            let plus = net.loss(x, y);
            net.layers[l].w[i] = orig - step;
            let minus = net.loss(x, y);
            net.layers[l].w[i] = orig;
            worst = worst.max(rel(analytic.weights[l][i], (plus - minus) / (2.0 * step)));
            count += 1;
        }
        for i in 0..net.layers[l].b.len() {
            let orig = net.layers[l].b[i];
            net.layers[l].b[i] = orig + step;
            let plus = net.loss(x, y);
            net.layers[l].b[i] = orig - step;
            let minus = net.loss(x, y);
            net.layers[l].b[i] = orig;
            worst = worst.max(rel(analytic.biases[l][i], (plus - minus) / (2.0 * step)));
            count += 1;
        }
    }
    GradientCheck { max_relative_error: worst, parameters_checked: count }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn batch(seed: u64, n: usize, d: usize, k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut r = rng(seed);
        let x = (0..n).map(|_| (0..d).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let y = (0..n).map(|i| i % k).collect();
        (x, y)
    }

    fn arch(d: usize, hidden: Vec<usize>, k: usize) -> MlpArchitecture {
        MlpArchitecture { input_dim: d, output_dim: k, params: MlpParams { hidden, ..Default::default() } }
    }

    #[test]
    fn preset_shapes() {
        assert_eq!(MlpArchitecture::nn_shallow(1000, 16).widths(), vec![1000, 100, 16]);
        assert_eq!(MlpArchitecture::ffdl(1000, 16).widths(), vec![1000, 250, 250, 250, 16]);
        assert_eq!(MlpArchitecture::nn_shallow(4, 2).parameter_count(), 4 * 100 + 100 + 100 * 2 + 2);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let (x, y) = batch(1, 8, 5, 3);
        let c = gradient_check(&arch(5, vec![4, 3], 3), &x, &y, 7);
        assert_eq!(c.parameters_checked, 5 * 4 + 4 + 4 * 3 + 3 + 3 * 3 + 3);
        assert!(c.passed(1e-4), "{c:?}");
        let c2 = gradient_check_with_step(&arch(5, vec![4, 3], 3), &x, &y, 7, 2e-5);
        assert!(c2.passed(1e-3), "{c2:?}");
    }

    #[test]
    fn zero_network_output_bias_gradient_is_closed_form() {
        let k = 4;
        let (x, _) = batch(2, 6, 3, k);
        let y = vec![0, 0, 1, 2, 3, 3];
        let a = arch(3, vec![5], k);
        let g = Mlp::zeros(&a).gradients(&x, &y);
        for c in 0..k {
            let share = y.iter().filter(|&&v| v == c).count() as f64 / y.len() as f64;
            assert!((g.biases[1][c] - (0.25 - share)).abs() < 1e-15);
        }
        assert!(g.weights.iter().flatten().all(|v| *v == 0.0));
        let uniform: Vec<usize> = (0..8).map(|i| i % k).collect();
        let (xu, _) = batch(3, 8, 3, k);
        assert!(Mlp::zeros(&a).gradients(&xu, &uniform).biases[1].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn training_reduces_loss() {
        let (x, _) = batch(4, 64, 6, 2);
        let y: Vec<usize> = x.iter().map(|r| (r[0] + r[1] > 0.0) as usize).collect();
        let p = MlpParams { hidden: vec![16], epochs: 30, learning_rate: 0.01, ..Default::default() };
        let m = Mlp::fit(&p, &x, &Encoded { y: y.clone(), n_classes: 2 }, 3);
        assert_eq!(m.epoch_losses.len(), 30);
        assert!(m.epoch_losses[29] < m.epoch_losses[0] * 0.5, "{:?}", m.epoch_losses);
    }
}
