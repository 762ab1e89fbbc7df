use serde::{Deserialize, Serialize};

use super::{Encoded, ModelError, NbParams};
use crate::util::softmax_in_place;

/// Multinomial naive Bayes with additive smoothing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct NaiveBayes {
    log_prior: Vec<f64>,
    /// `log_theta[c][j] = ln((N_cj + alpha) / (N_c + alpha * d))`
    log_theta: Vec<Vec<f64>>,
}

impl NaiveBayes {
    pub fn fit(p: &NbParams, x: &[Vec<f64>], data: &Encoded) -> Result<Self, ModelError> {
        let d = x[0].len();
        let k = data.n_classes;
        let mut feature_sums = vec![vec![0.0; d]; k];
        let mut class_counts = vec![0usize; k];
        for (row_idx, (row, &c)) in x.iter().zip(&data.y).enumerate() {
            class_counts[c] += 1;
            for (j, &v) in row.iter().enumerate() {
                if v < 0.0 {
                    return Err(ModelError::NegativeFeature { row: row_idx, column: j });
                }
                feature_sums[c][j] += v;
            }
        }
        let n = x.len() as f64;
        let log_prior = class_counts.iter().map(|&c| (c as f64 / n).ln()).collect();
        let log_theta = feature_sums
            .iter()
            .map(|sums| {
                let total: f64 = sums.iter().sum::<f64>() + p.alpha * d as f64;
                sums.iter().map(|s| ((s + p.alpha) / total).ln()).collect()
            })
            .collect();
        Ok(NaiveBayes { log_prior, log_theta })
    }

    pub fn log_joint(&self, x: &[f64]) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_theta)
            .map(|(prior, theta)| {
                prior + x.iter().zip(theta).filter(|(v, _)| **v != 0.0).map(|(v, t)| v * t).sum::<f64>()
            })
            .collect()
    }

    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.log_joint(x);
        softmax_in_place(&mut v);
        v
    }
}
