use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::optim::{sparse_rows, AdamConfig, Moments};
use super::{Encoded, LogRegParams, SvmParams};
use crate::util::{rng, softmax_in_place};

fn scores(weights: &[f64], bias: &[f64], dim: usize, x: &[f64]) -> Vec<f64> {
    bias.iter()
        .enumerate()
        .map(|(c, b)| b + weights[c * dim..(c + 1) * dim].iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
        .collect()
}

/// Multinomial logistic regression trained with mini-batch Adam.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct Softmax {
    dim: usize,
    /// Row-major `classes × dim`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Softmax {
    pub fn fit(p: &LogRegParams, x: &[Vec<f64>], data: &Encoded, seed: u64) -> Self {
        let (n, d, k) = (x.len(), x[0].len(), data.n_classes);
        let rows = sparse_rows(x);
        let mut w = vec![0.0; k * d];
        let mut b = vec![0.0; k];
        let mut mw = Moments::new(k * d);
        let mut mb = Moments::new(k);
        let cfg = AdamConfig { lr: p.learning_rate, beta1: p.beta1, beta2: p.beta2, epsilon: p.epsilon };
        let mut rng = rng(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut gw = vec![0.0; k * d];
        let mut gb = vec![0.0; k];
        let mut t = 0u64;
        for _ in 0..p.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(p.batch_size) {
                gw.iter_mut().for_each(|g| *g = 0.0);
                gb.iter_mut().for_each(|g| *g = 0.0);
                for &i in batch {
                    let mut s: Vec<f64> =
                        (0..k).map(|c| b[c] + rows[i].iter().map(|&(j, v)| w[c * d + j] * v).sum::<f64>()).collect();
                    softmax_in_place(&mut s);
                    s[data.y[i]] -= 1.0;
                    for c in 0..k {
                        gb[c] += s[c];
                        for &(j, v) in &rows[i] {
                            gw[c * d + j] += s[c] * v;
                        }
                    }
                }
                let scale = 1.0 / batch.len() as f64;
                for (g, wv) in gw.iter_mut().zip(&w) {
                    *g = *g * scale + p.l2 * wv;
                }
                gb.iter_mut().for_each(|g| *g *= scale);
                t += 1;
                mw.step(&cfg, t, &mut w, &gw);
                mb.step(&cfg, t, &mut b, &gb);
            }
        }
        Softmax { dim: d, weights: w, bias: b }
    }

    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut s = scores(&self.weights, &self.bias, self.dim, x);
        softmax_in_place(&mut s);
        s
    }
}

/// One-vs-rest linear SVM: hinge loss, L2 penalty, per-sample SGD.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct LinearSvm {
    dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LinearSvm {
    pub fn fit(p: &SvmParams, x: &[Vec<f64>], data: &Encoded, seed: u64) -> Self {
        let (n, d, k) = (x.len(), x[0].len(), data.n_classes);
        let rows = sparse_rows(x);
        // w_c = scale[c] * v_c, so the L2 shrink is O(1) per step.
        let mut v = vec![0.0; k * d];
        let mut scale = vec![1.0; k];
        let mut b = vec![0.0; k];
        let mut rng = rng(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut t = 0u64;
        for _ in 0..p.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = p.learning_rate / (1.0 + p.learning_rate * p.l2 * t as f64);
                for c in 0..k {
                    let y = if data.y[i] == c { 1.0 } else { -1.0 };
                    let dot: f64 = rows[i].iter().map(|&(j, x)| v[c * d + j] * x).sum();
                    let margin = y * (scale[c] * dot + b[c]);
                    scale[c] *= 1.0 - eta * p.l2;
                    if margin < 1.0 {
                        for &(j, x) in &rows[i] {
                            v[c * d + j] += eta * y * x / scale[c];
                        }
                        b[c] += eta * y;
                    }
                    if scale[c] < 1e-9 {
                        v[c * d..(c + 1) * d].iter_mut().for_each(|w| *w *= scale[c]);
                        scale[c] = 1.0;
                    }
                }
            }
        }
        for c in 0..k {
            v[c * d..(c + 1) * d].iter_mut().for_each(|w| *w *= scale[c]);
        }
        LinearSvm { dim: d, weights: v, bias: b }
    }

    pub fn decision(&self, x: &[f64]) -> Vec<f64> {
        scores(&self.weights, &self.bias, self.dim, x)
    }

    /// Softmax of the margins; a ranking, not a calibrated probability.
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut s = self.decision(x);
        softmax_in_place(&mut s);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_uniform_softmax() {
        let m = Softmax { dim: 3, weights: vec![0.0; 48], bias: vec![0.0; 16] };
        assert_eq!(m.proba(&[1.0, 2.0, 3.0]), vec![1.0 / 16.0; 16]);
    }

    #[test]
    fn svm_separates_a_line() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 10.0 - 2.0]).collect();
        let y: Vec<usize> = (0..40).map(|i| (i >= 20) as usize).collect();
        let m = LinearSvm::fit(&SvmParams::default(), &x, &Encoded { y: y.clone(), n_classes: 2 }, 1);
        let correct = x.iter().zip(&y).filter(|(r, &c)| crate::util::argmax(&m.decision(r)) == c).count();
        assert!(correct >= 38, "{correct}");
    }

    #[test]
    fn logistic_loss_decreases_with_training() {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![(i % 3) as f64, ((i + 1) % 2) as f64, 1.0]).collect();
        let y: Vec<usize> = (0..60).map(|i| i % 3).collect();
        let data = Encoded { y: y.clone(), n_classes: 3 };
        let loss = |epochs| {
            let m = Softmax::fit(&LogRegParams { epochs, ..Default::default() }, &x, &data, 3);
            x.iter().zip(&y).map(|(r, &c)| -m.proba(r)[c].ln()).sum::<f64>() / 60.0
        };
        assert!(loss(50) < loss(1));
        assert!(loss(1) < 3f64.ln());
    }
}
