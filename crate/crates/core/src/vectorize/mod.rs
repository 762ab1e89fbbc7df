//! Vocabularies, bag-of-words and TF-IDF document vectors.
//!
//! Every vectorizer consumes *term sequences* produced by [`text_terms`]:
//! normalized text, hashtag and mention markers stripped to their content,
//! URLs and punctuation dropped, Latin words lowercased.

mod featurizer;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textproc::{normalize, tokenize, TokenKind};

pub use featurizer::{FeatureConfig, Featurizer, TextFeature};

pub const VECTORIZER_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum VectorizeError {
    #[error("corpus has no documents or no n-grams")]
    EmptyCorpus,
    #[error("no feature blocks to concatenate")]
    EmptyInput,
    #[error("invalid n-gram range ({0}, {1})")]
    InvalidRange(usize, usize),
    #[error("max_terms must be at least 1")]
    InvalidMaxTerms,
    #[error("unsupported vectorizer schema version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("malformed vectorizer document: {0}")]
    Malformed(String),
    #[error("embedding: {0}")]
    Embedding(String),
}

/// The canonical term sequence of a text.
pub fn text_terms(text: &str) -> Vec<String> {
    tokenize(&normalize(text))
        .into_iter()
        .filter_map(|t| match t.kind {
            TokenKind::Word | TokenKind::Number | TokenKind::Emoji => Some(t.text),
            TokenKind::LatinWord => Some(t.text.to_lowercase()),
            TokenKind::Hashtag | TokenKind::Mention => Some(t.text[1..].to_lowercase()),
            TokenKind::Url | TokenKind::Punctuation => None,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Word,
    Char,
}

/// All n-grams of orders `lo..=hi`. Word n-grams join terms with a space;
/// char n-grams run over the terms joined by single spaces.
pub fn ngrams(terms: &[String], unit: Unit, (lo, hi): (usize, usize)) -> Vec<String> {
    let mut out = Vec::new();
    match unit {
        Unit::Word => {
            for n in lo..=hi {
                for w in terms.windows(n) {
                    out.push(w.join(" "));
                }
            }
        }
        Unit::Char => {
            let chars: Vec<char> = terms.join(" ").chars().collect();
            for n in lo..=hi {
                for w in chars.windows(n) {
                    out.push(w.iter().collect());
                }
            }
        }
    }
    out
}

fn check_params(n_range: (usize, usize), max_terms: usize) -> Result<(), VectorizeError> {
    if n_range.0 == 0 || n_range.0 > n_range.1 {
        return Err(VectorizeError::InvalidRange(n_range.0, n_range.1));
    }
    if max_terms == 0 {
        return Err(VectorizeError::InvalidMaxTerms);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    pub unit: Unit,
    pub n_range: (usize, usize),
    pub max_terms: usize,
}

impl Vocabulary {
    fn from_terms(terms: Vec<String>, unit: Unit, n_range: (usize, usize), max_terms: usize) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, index, unit, n_range, max_terms }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Raw in-vocabulary n-gram counts of one document.
    pub fn counts(&self, terms: &[String]) -> Vec<f64> {
        let mut v = vec![0.0; self.terms.len()];
        for g in ngrams(terms, self.unit, self.n_range) {
            if let Some(&i) = self.index.get(&g) {
                v[i] += 1.0;
            }
        }
        v
    }
}

/// Top `max_terms` n-grams by corpus frequency; ties go to the
/// lexicographically smaller n-gram.
pub fn build_vocab(
    corpus: &[Vec<String>],
    unit: Unit,
    n_range: (usize, usize),
    max_terms: usize,
) -> Result<Vocabulary, VectorizeError> {
    check_params(n_range, max_terms)?;
    let mut freq: HashMap<String, u64> = HashMap::new();
    for doc in corpus {
        for g in ngrams(doc, unit, n_range) {
            *freq.entry(g).or_default() += 1;
        }
    }
    if freq.is_empty() {
        return Err(VectorizeError::EmptyCorpus);
    }
    let mut ranked: Vec<(String, u64)> = freq.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(max_terms);
    Ok(Vocabulary::from_terms(ranked.into_iter().map(|(t, _)| t).collect(), unit, n_range, max_terms))
}

/// A named span inside a [`FeatureVector`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout: Vec<Block>,
}

impl FeatureVector {
    pub fn single(name: &str, values: Vec<f64>) -> Self {
        let layout = vec![Block { name: name.to_string(), start: 0, len: values.len() }];
        FeatureVector { values, layout }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn bow_vector(vocab: &Vocabulary, terms: &[String]) -> FeatureVector {
    FeatureVector::single("bow", vocab.counts(terms))
}

/// Concatenates blocks in order; nested layouts are flattened.
pub fn concat_features(blocks: &[FeatureVector]) -> Result<FeatureVector, VectorizeError> {
    if blocks.is_empty() {
        return Err(VectorizeError::EmptyInput);
    }
    let mut values = Vec::with_capacity(blocks.iter().map(FeatureVector::len).sum());
    let mut layout = Vec::new();
    for b in blocks {
        let offset = values.len();
        values.extend_from_slice(&b.values);
        layout.extend(b.layout.iter().map(|blk| Block { start: blk.start + offset, ..blk.clone() }));
    }
    Ok(FeatureVector { values, layout })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TfidfModel {
    pub vocabulary: Vocabulary,
    /// `ln((1 + N) / (1 + df)) + 1`, aligned with the vocabulary.
    pub idf: Vec<f64>,
    pub doc_count: usize,
}

pub fn tfidf_fit(
    corpus: &[Vec<String>],
    unit: Unit,
    n_range: (usize, usize),
    max_terms: usize,
) -> Result<TfidfModel, VectorizeError> {
    let vocabulary = build_vocab(corpus, unit, n_range, max_terms)?;
    let mut df = vec![0u64; vocabulary.len()];
    for doc in corpus {
        let mut seen = vec![false; vocabulary.len()];
        for g in ngrams(doc, unit, n_range) {
            if let Some(i) = vocabulary.column(&g) {
                if !seen[i] {
                    seen[i] = true;
                    df[i] += 1;
                }
            }
        }
    }
    let n = corpus.len() as f64;
    let idf = df.iter().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();
    Ok(TfidfModel { vocabulary, idf, doc_count: corpus.len() })
}

impl TfidfModel {
    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.vocabulary.column(term).map(|i| self.idf[i])
    }

    /// `count × idf`, L2-normalized; documents without in-vocabulary terms
    /// map to the zero vector.
    pub fn transform(&self, terms: &[String]) -> FeatureVector {
        let mut v = self.vocabulary.counts(terms);
        for (x, w) in v.iter_mut().zip(&self.idf) {
            *x *= w;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        FeatureVector::single("tfidf", v)
    }
}

pub fn tfidf_transform(model: &TfidfModel, terms: &[String]) -> FeatureVector {
    model.transform(terms)
}

// ---- persistence ----------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub term: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idf: Option<f64>,
}

/// Versioned JSON form of a [`Vocabulary`] or [`TfidfModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorizerDoc {
    pub schema_version: u32,
    pub kind: String,
    pub unit: Unit,
    pub n_range: (usize, usize),
    pub max_terms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_count: Option<usize>,
    pub terms: Vec<TermEntry>,
}

impl Vocabulary {
    pub fn to_doc(&self) -> VectorizerDoc {
        VectorizerDoc {
            schema_version: VECTORIZER_SCHEMA_VERSION,
            kind: "vocabulary".into(),
            unit: self.unit,
            n_range: self.n_range,
            max_terms: self.max_terms,
            doc_count: None,
            terms: self.terms.iter().map(|t| TermEntry { term: t.clone(), idf: None }).collect(),
        }
    }

    pub fn from_doc(doc: &VectorizerDoc) -> Result<Self, VectorizeError> {
        check_doc(doc)?;
        check_params(doc.n_range, doc.max_terms).map_err(|e| VectorizeError::Malformed(e.to_string()))?;
        let terms: Vec<String> = doc.terms.iter().map(|e| e.term.clone()).collect();
        let vocab = Vocabulary::from_terms(terms, doc.unit, doc.n_range, doc.max_terms);
        if vocab.index.len() != vocab.terms.len() {
            return Err(VectorizeError::Malformed("duplicate term".into()));
        }
        Ok(vocab)
    }
}

fn check_doc(doc: &VectorizerDoc) -> Result<(), VectorizeError> {
    if doc.schema_version != VECTORIZER_SCHEMA_VERSION {
        return Err(VectorizeError::VersionMismatch { found: doc.schema_version, expected: VECTORIZER_SCHEMA_VERSION });
    }
    Ok(())
}

impl TfidfModel {
    pub fn to_doc(&self) -> VectorizerDoc {
        let mut doc = self.vocabulary.to_doc();
        doc.kind = "tfidf".into();
        doc.doc_count = Some(self.doc_count);
        for (e, w) in doc.terms.iter_mut().zip(&self.idf) {
            e.idf = Some(*w);
        }
        doc
    }

    pub fn from_doc(doc: &VectorizerDoc) -> Result<Self, VectorizeError> {
        let vocabulary = Vocabulary::from_doc(doc)?;
        let idf = doc
            .terms
            .iter()
            .map(|e| e.idf.filter(|w| w.is_finite() && *w > 0.0))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| VectorizeError::Malformed("every tf-idf term needs a positive idf".into()))?;
        let doc_count = doc.doc_count.ok_or_else(|| VectorizeError::Malformed("missing doc_count".into()))?;
        Ok(TfidfModel { vocabulary, idf, doc_count })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("vectorizer serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, VectorizeError> {
        let doc: VectorizerDoc = serde_json::from_str(json).map_err(|e| VectorizeError::Malformed(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn docs(texts: &[&str]) -> Vec<Vec<String>> {
        texts.iter().map(|t| t.split_whitespace().map(String::from).collect()).collect()
    }

    #[test]
    fn vocab_by_frequency() {
        let v = build_vocab(&docs(&["a b a"]), Unit::Word, (1, 1), 2).unwrap();
        assert_eq!(v.terms(), ["a", "b"]);
        let v = build_vocab(&docs(&["a b a"]), Unit::Word, (1, 1), 100).unwrap();
        assert_eq!(v.len(), 2);
        let v = build_vocab(&docs(&["z y"]), Unit::Word, (1, 1), 100).unwrap();
        assert_eq!(v.terms(), ["y", "z"]);
    }

    #[test]
    fn joint_ranking_across_orders() {
        let v = build_vocab(&docs(&["a b a b"]), Unit::Word, (1, 2), 3).unwrap();
        // a:2 b:2 "a b":2 "b a":1
        assert_eq!(v.terms(), ["a", "a b", "b"]);
    }

    #[test]
    fn vocab_errors() {
        assert_eq!(build_vocab(&[], Unit::Word, (1, 1), 5), Err(VectorizeError::EmptyCorpus));
        assert_eq!(build_vocab(&docs(&["a"]), Unit::Word, (2, 1), 5), Err(VectorizeError::InvalidRange(2, 1)));
        assert_eq!(build_vocab(&docs(&["a"]), Unit::Word, (1, 1), 0), Err(VectorizeError::InvalidMaxTerms));
    }

    #[test]
    fn char_ngrams_keep_spaces() {
        let g = ngrams(&["ab".into(), "c".into()], Unit::Char, (2, 2));
        assert_eq!(g, ["ab", "b ", " c"]);
    }

    #[test]
    fn bow_counts() {
        let v = build_vocab(&docs(&["a b a"]), Unit::Word, (1, 1), 2).unwrap();
        assert_eq!(bow_vector(&v, &docs(&["a a b"])[0]).values, vec![2.0, 1.0]);
        assert_eq!(bow_vector(&v, &docs(&["q"])[0]).values, vec![0.0, 0.0]);
    }

    #[test]
    fn idf_by_hand() {
        let m = tfidf_fit(&docs(&["a b", "a c"]), Unit::Word, (1, 1), 10).unwrap();
        assert!((m.idf_of("a").unwrap() - 1.0).abs() < 1e-15);
        assert!((m.idf_of("b").unwrap() - (1.5f64.ln() + 1.0)).abs() < 1e-15);
        assert!((m.idf_of("b").unwrap() - 1.405465).abs() < 1e-6);
        assert_eq!(m.idf_of("zzz"), None);
    }

    #[test]
    fn transform_by_hand() {
        let m = tfidf_fit(&docs(&["a b", "a c"]), Unit::Word, (1, 1), 10).unwrap();
        let v = m.transform(&docs(&["a b"])[0]);
        let a = v.values[m.vocabulary.column("a").unwrap()];
        let b = v.values[m.vocabulary.column("b").unwrap()];
        assert!((a - 0.5797).abs() < 1e-4, "{a}");
        assert!((b - 0.8148).abs() < 1e-4, "{b}");
        let zero = m.transform(&docs(&["q"])[0]);
        assert!(zero.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn reference_pair_has_unit_norm() {
        let (x, y) = (0.7272935631121525f64, 0.6863265061584242f64);
        assert!((x * x + y * y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn concat_lengths_and_layout() {
        let a = FeatureVector::single("bow", vec![1.0; 1000]);
        let b = FeatureVector::single("w2v", vec![2.0; 100]);
        let c = concat_features(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.len(), 1100);
        assert_eq!(c.layout[1], Block { name: "w2v".into(), start: 1000, len: 100 });
        assert_eq!(concat_features(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(concat_features(&[]), Err(VectorizeError::EmptyInput));
        let d = FeatureVector::single("x", vec![3.0]);
        let left = concat_features(&[concat_features(&[a.clone(), b.clone()]).unwrap(), d.clone()]).unwrap();
        assert_eq!(left, concat_features(&[a, b, d]).unwrap());
    }

    #[test]
    fn text_terms_pipeline() {
        let t = text_terms("Hello #وسم @User https://x.y مَرْحَبًا!");
        assert_eq!(t, ["hello", "وسم", "user", "مرحبا"]);
    }

    #[test]
    fn doc_round_trip_and_version() {
        let m = tfidf_fit(&docs(&["a b", "a c", "c d"]), Unit::Char, (2, 3), 50).unwrap();
        let back = TfidfModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let mut doc = m.to_doc();
        doc.schema_version = 99;
        assert!(matches!(TfidfModel::from_doc(&doc), Err(VectorizeError::VersionMismatch { .. })));
    }

    // Independent recomputation: df by set membership, idf, norm.
    fn oracle(corpus: &[Vec<String>], doc: &[String], vocab: &[String]) -> Vec<f64> {
        let n = corpus.len() as f64;
        let raw: Vec<f64> = vocab
            .iter()
            .map(|t| {
                let df = corpus.iter().filter(|d| d.contains(t)).count() as f64;
                let tf = doc.iter().filter(|w| *w == t).count() as f64;
                tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
            })
            .collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        raw.iter().map(|x| if norm > 0.0 { x / norm } else { 0.0 }).collect()
    }

    proptest! {
        #[test]
        fn tfidf_matches_oracle(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let corpus: Vec<Vec<String>> = (0..5)
                .map(|_| (0..rng.random_range(0..8)).map(|_| format!("w{}", rng.random_range(0..6))).collect())
                .collect();
            prop_assume!(corpus.iter().any(|d| !d.is_empty()));
            let m = tfidf_fit(&corpus, Unit::Word, (1, 1), 1000).unwrap();
            for doc in &corpus {
                let got = m.transform(doc).values;
                let want = oracle(&corpus, doc, m.vocabulary.terms());
                for (g, w) in got.iter().zip(&want) {
                    prop_assert!((g - w).abs() < 1e-12);
                }
                let norm = got.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-9);
                prop_assert!(got.iter().all(|x| x.is_finite()));
            }
        }

        #[test]
        fn vocab_is_deterministic(words in proptest::collection::vec("[a-e]{1,2}", 1..40)) {
            let corpus = vec![words];
            let a = build_vocab(&corpus, Unit::Word, (1, 2), 7).unwrap();
            let b = build_vocab(&corpus, Unit::Word, (1, 2), 7).unwrap();
            prop_assert_eq!(a.terms(), b.terms());
            prop_assert!(a.len() <= 7);
        }
    }
}
