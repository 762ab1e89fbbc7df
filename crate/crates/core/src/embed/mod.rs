//! Skip-gram word2vec with negative sampling.
//!
//! Training is single-threaded and fully determined by the corpus, the
//! parameters and the seed.

mod persist;

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::rng;

pub use persist::{load_embedding, read_embedding, save_embedding, write_embedding, write_text_vectors};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("no term reaches min_count")]
    EmptyVocabulary,
    #[error("unknown term {0:?}")]
    UnknownTerm(String),
    #[error("query has no positive or negative terms")]
    EmptyQuery,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("corrupt embedding file: {0}")]
    Corrupt(String),
    #[error("unsupported embedding schema version {0}")]
    VersionMismatch(u32),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Word2VecParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub min_count: u64,
    pub subsample: f64,
}

impl Default for Word2VecParams {
    fn default() -> Self {
        Word2VecParams {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            min_count: 5,
            subsample: 1e-3,
        }
    }
}

impl Word2VecParams {
    fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: &str| Err(EmbedError::InvalidParams(m.into()));
        if self.dim == 0 || self.window == 0 || self.epochs == 0 {
            return bad("dim, window and epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0)
            || !(self.min_learning_rate >= 0.0)
            || self.min_learning_rate > self.learning_rate
        {
            return bad("need 0 <= min_learning_rate <= learning_rate, learning_rate > 0");
        }
        if !(self.subsample >= 0.0) {
            return bad("subsample must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub dim: usize,
    terms: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    /// Row-major `|V| × dim` input vectors.
    vectors: Vec<f64>,
    /// Cumulative unigram^0.75 distribution used to draw negatives.
    negative_cdf: Vec<f64>,
    pub params: Word2VecParams,
    pub seed: u64,
    /// Mean negative-sampling loss per epoch.
    pub epoch_losses: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn negative_cdf(counts: &[u64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = counts
        .iter()
        .map(|&c| {
            acc += (c as f64).powf(0.75);
            acc
        })
        .collect();
    for x in cdf.iter_mut() {
        *x /= acc;
    }
    cdf
}

impl EmbeddingModel {
    pub(crate) fn from_parts(
        terms: Vec<String>,
        counts: Vec<u64>,
        vectors: Vec<f64>,
        dim: usize,
        params: Word2VecParams,
        seed: u64,
        epoch_losses: Vec<f64>,
    ) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let negative_cdf = negative_cdf(&counts);
        EmbeddingModel { dim, terms, counts, index, vectors, negative_cdf, params, seed, epoch_losses }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn vocab_len(&self) -> usize {
        self.terms.len()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.index.get(term).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn raw_vectors(&self) -> &[f64] {
        &self.vectors
    }

    fn sample_negative(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        self.negative_cdf.partition_point(|&c| c <= u).min(self.terms.len() - 1)
    }
}

/// Trains skip-gram embeddings with negative sampling.
pub fn train_word2vec(
    corpus: &[Vec<String>],
    params: &Word2VecParams,
    seed: u64,
) -> Result<EmbeddingModel, EmbedError> {
    params.validate()?;
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for sentence in corpus {
        for w in sentence {
            *freq.entry(w.as_str()).or_default() += 1;
        }
    }
    let mut vocab: Vec<(&str, u64)> = freq.into_iter().filter(|&(_, c)| c >= params.min_count).collect();
    if vocab.is_empty() {
        return Err(EmbedError::EmptyVocabulary);
    }
    vocab.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let terms: Vec<String> = vocab.iter().map(|(t, _)| t.to_string()).collect();
    let counts: Vec<u64> = vocab.iter().map(|&(_, c)| c).collect();
    let dim = params.dim;
    let mut rng = rng(seed);

    let vectors: Vec<f64> = (0..terms.len() * dim).map(|_| (rng.random::<f64>() - 0.5) / dim as f64).collect();
    let mut model = EmbeddingModel::from_parts(terms, counts, vectors, dim, params.clone(), seed, Vec::new());
    let mut context = vec![0.0; model.terms.len() * dim];

    let sentences: Vec<Vec<usize>> =
        corpus.iter().map(|s| s.iter().filter_map(|w| model.index.get(w).copied()).collect()).collect();
    let total: u64 = model.counts.iter().sum();
    let keep_prob: Vec<f64> = model
        .counts
        .iter()
        .map(|&c| {
            if params.subsample <= 0.0 {
                return 1.0;
            }
            let threshold = params.subsample * total as f64;
            ((c as f64 / threshold).sqrt() + 1.0) * threshold / c as f64
        })
        .collect();

    let planned = (params.epochs as u64 * total).max(1) as f64;
    let mut processed = 0u64;
    let mut grad = vec![0.0; dim];
    for _ in 0..params.epochs {
        let (mut loss_sum, mut pairs) = (0.0, 0u64);
        for sentence in &sentences {
            processed += sentence.len() as u64;
            let kept: Vec<usize> = sentence
                .iter()
                .copied()
                .filter(|&w| keep_prob[w] >= 1.0 || rng.random::<f64>() < keep_prob[w])
                .collect();
            let lr = (params.learning_rate * (1.0 - processed as f64 / planned)).max(params.min_learning_rate);
            for (pos, &center) in kept.iter().enumerate() {
                let radius = rng.random_range(1..=params.window);
                let lo = pos.saturating_sub(radius);
                let hi = (pos + radius).min(kept.len() - 1);
                for (cpos, &target) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                    if cpos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let input = &model.vectors[center * dim..(center + 1) * dim];
                    for k in 0..=params.negatives {
                        let (word, label) = if k == 0 {
                            (target, 1.0)
                        } else {
                            let w = model.sample_negative(&mut rng);
                            if w == target {
                                continue;
                            }
                            (w, 0.0)
                        };
                        let out = &mut context[word * dim..(word + 1) * dim];
                        let score = sigmoid(dot(input, out));
                        loss_sum -= if label == 1.0 { score.max(1e-12).ln() } else { (1.0 - score).max(1e-12).ln() };
                        let g = (label - score) * lr;
                        for d in 0..dim {
                            grad[d] += g * out[d];
                            out[d] += g * input[d];
                        }
                    }
                    pairs += 1;
                    let input = &mut model.vectors[center * dim..(center + 1) * dim];
                    for d in 0..dim {
                        input[d] += grad[d];
                    }
                }
            }
        }
        model.epoch_losses.push(if pairs > 0 { loss_sum / pairs as f64 } else { 0.0 });
    }
    Ok(model)
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter().map(|x| x / n).collect()
    } else {
        v.to_vec()
    }
}

/// 3CosAdd analogy / similarity query.
///
/// The query is the sum of unit-normalized positive vectors minus the sum of
/// unit-normalized negative vectors; every other term is ranked by cosine.
pub fn most_similar(
    model: &EmbeddingModel,
    positive: &[&str],
    negative: &[&str],
    topn: usize,
) -> Result<Vec<(f64, String)>, EmbedError> {
    if positive.is_empty() && negative.is_empty() {
        return Err(EmbedError::EmptyQuery);
    }
    let mut query = vec![0.0; model.dim];
    let mut excluded = Vec::new();
    for (terms, sign) in [(positive, 1.0), (negative, -1.0)] {
        for &t in terms {
            let &i = model.index.get(t).ok_or_else(|| EmbedError::UnknownTerm(t.to_string()))?;
            excluded.push(i);
            for (q, x) in query.iter_mut().zip(unit(model.row(i))) {
                *q += sign * x;
            }
        }
    }
    let query = unit(&query);
    let mut scored: Vec<(f64, usize)> = (0..model.terms.len())
        .filter(|i| !excluded.contains(i))
        .map(|i| {
            let cos = dot(&query, &unit(model.row(i))).clamp(-1.0, 1.0);
            (cos, i)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(topn).map(|(s, i)| (s, model.terms[i].clone())).collect())
}

/// Mean of the in-vocabulary token vectors, or zeros.
pub fn doc_embedding(model: &EmbeddingModel, tokens: &[String]) -> Vec<f64> {
    let mut acc = vec![0.0; model.dim];
    let mut n = 0usize;
    for t in tokens {
        if let Some(&i) = model.index.get(t) {
            for (a, x) in acc.iter_mut().zip(model.row(i)) {
                *a += x;
            }
            n += 1;
        }
    }
    if n > 0 {
        acc.iter_mut().for_each(|a| *a /= n as f64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy(vectors: Vec<f64>, terms: &[&str], dim: usize) -> EmbeddingModel {
        let n = terms.len();
        EmbeddingModel::from_parts(
            terms.iter().map(|s| s.to_string()).collect(),
            vec![1; n],
            vectors,
            dim,
            Word2VecParams::default(),
            0,
            Vec::new(),
        )
    }

    fn s(words: &str) -> Vec<String> {
        words.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn min_count_filters_rare_terms() {
        let mut corpus = vec![s("a a a a a b b b b")];
        corpus.push(s("a"));
        let p = Word2VecParams { dim: 4, min_count: 5, epochs: 1, ..Default::default() };
        let m = train_word2vec(&corpus, &p, 1).unwrap();
        assert!(m.contains("a"));
        assert!(!m.contains("b"));
        let p = Word2VecParams { min_count: 50, ..p };
        assert!(matches!(train_word2vec(&corpus, &p, 1), Err(EmbedError::EmptyVocabulary)));
    }

    #[test]
    fn training_is_deterministic() {
        let corpus: Vec<Vec<String>> = (0..50).map(|i| s(&format!("a b c d{} e", i % 5))).collect();
        let p = Word2VecParams { dim: 8, min_count: 1, epochs: 3, ..Default::default() };
        let a = train_word2vec(&corpus, &p, 3).unwrap();
        let b = train_word2vec(&corpus, &p, 3).unwrap();
        assert_eq!(a.raw_vectors(), b.raw_vectors());
        assert!(a.raw_vectors().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn nearest_neighbour_on_three_words() {
        let m = toy(vec![1.0, 0.0, 0.9, 0.1, -1.0, 0.2], &["w", "near", "far"], 2);
        let r = most_similar(&m, &["w"], &[], 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, "near");
    }

    #[test]
    fn analogy_shape_and_exclusion() {
        let m = toy(
            vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.7, 0.7, 0.1],
            &["queen", "lady", "man", "bride"],
            3,
        );
        let r = most_similar(&m, &["queen", "lady"], &["man"], 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, "bride");
        let all = most_similar(&m, &["queen"], &[], 10).unwrap();
        assert!(all.iter().all(|(_, t)| t != "queen"));
        assert!(all.windows(2).all(|w| w[0].0 >= w[1].0));
        assert!(all.iter().all(|(s, _)| (-1.0..=1.0).contains(s)));
        assert!(matches!(most_similar(&m, &[], &[], 1), Err(EmbedError::EmptyQuery)));
        assert!(matches!(most_similar(&m, &["king"], &[], 1), Err(EmbedError::UnknownTerm(_))));
    }

    #[test]
    fn doc_embedding_means() {
        let m = toy(vec![1.0, 2.0, 3.0, 6.0], &["u", "v"], 2);
        assert_eq!(doc_embedding(&m, &s("x y")), vec![0.0, 0.0]);
        assert_eq!(doc_embedding(&m, &s("u")), vec![1.0, 2.0]);
        assert_eq!(doc_embedding(&m, &s("u v")), vec![2.0, 4.0]);
    }

    proptest! {
        #[test]
        fn doc_embedding_is_permutation_invariant(mut idx in proptest::collection::vec(0usize..4, 0..10), rot in 0usize..10) {
            let m = toy(vec![0.5, -1.0, 2.0, 0.25, 3.0, 1.0, -0.5, 0.0], &["a", "b", "c", "d"], 2);
            let words = ["a", "b", "c", "d"];
            let doc: Vec<String> = idx.iter().map(|&i| words[i].to_string()).collect();
            if !idx.is_empty() { let r = rot % idx.len(); idx.rotate_left(r); }
            idx.reverse();
            let perm: Vec<String> = idx.iter().map(|&i| words[i].to_string()).collect();
            let a = doc_embedding(&m, &doc);
            let b = doc_embedding(&m, &perm);
            for (x, y) in a.iter().zip(&b) { prop_assert!((x - y).abs() < 1e-12); }
        }
    }
}
