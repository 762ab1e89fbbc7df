use serde::{Deserialize, Serialize};

use super::{Encoded, KnnParams};

/// Euclidean k-nearest neighbours with majority vote.
///
/// Neighbours are ordered by (distance, training index); a vote tie goes to
/// the smallest label index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct Knn {
    k: usize,
    n_classes: usize,
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
}

impl Knn {
    pub fn fit(p: &KnnParams, x: &[Vec<f64>], data: &Encoded) -> Self {
        Knn { k: p.k, n_classes: data.n_classes, x: x.to_vec(), y: data.y.clone() }
    }

    pub fn neighbours(&self, q: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        let k = self.k.min(d.len());
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.truncate(k);
        d.into_iter().map(|(_, i)| i).collect()
    }

    /// Vote fractions over the k nearest training points.
    pub fn proba(&self, q: &[f64]) -> Vec<f64> {
        let nn = self.neighbours(q);
        let mut votes = vec![0.0; self.n_classes];
        for &i in &nn {
            votes[self.y[i]] += 1.0;
        }
        votes.iter_mut().for_each(|v| *v /= nn.len() as f64);
        votes
    }
}
