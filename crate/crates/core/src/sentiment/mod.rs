//! Three-way tweet sentiment and per-type sentiment shares.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::svg::{bar_chart, Series};
use crate::corpus::{balance_by_type, AxisSide, CorpusError, PersonalityLabel, TaggedText, TweetRecord};
use crate::models::{train_classifier, Algorithm, ClassifierModel, ClassifierSpec, ModelError};
use crate::util::argmax;
use crate::vectorize::{text_terms, tfidf_fit, TfidfModel, Unit, VectorizeError, VectorizerDoc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [SentimentLabel::Positive, SentimentLabel::Negative, SentimentLabel::Neutral];

    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SentimentLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown sentiment label {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("no training example labelled {0}")]
    MissingClass(SentimentLabel),
    #[error("personality type {0} has no tweets")]
    MissingType(PersonalityLabel),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error(transparent)]
    Corpus(CorpusError),
    #[error("unsupported sentiment model schema version {0}")]
    VersionMismatch(u32),
    #[error("malformed sentiment model: {0}")]
    Malformed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CorpusError> for SentimentError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::MissingType(l) => SentimentError::MissingType(l),
            other => SentimentError::Corpus(other),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentConfig {
    pub max_terms: usize,
    /// Logistic-regression hyperparameters.
    pub hyperparams: serde_json::Map<String, serde_json::Value>,
}

impl Default for SentimentConfig {
    fn default() -> Self {
        SentimentConfig { max_terms: 20_000, hyperparams: Default::default() }
    }
}

/// Unigram TF-IDF followed by softmax regression.
#[derive(Clone, Debug, PartialEq)]
pub struct SentimentModel {
    tfidf: TfidfModel,
    classifier: ClassifierModel,
    /// Column of each [`SentimentLabel`] in the classifier's label set.
    columns: [usize; 3],
}

pub const SENTIMENT_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SentimentDoc {
    schema_version: u32,
    tfidf: VectorizerDoc,
    classifier: ClassifierModel,
}

/// A classified text.
#[derive(Clone, Debug, PartialEq)]
pub struct Classified {
    pub label: SentimentLabel,
    /// Positive, negative, neutral.
    pub probabilities: [f64; 3],
}

pub fn train_sentiment(
    corpus: &[TaggedText],
    config: &SentimentConfig,
    seed: u64,
) -> Result<SentimentModel, SentimentError> {
    for l in SentimentLabel::ALL {
        if !corpus.iter().any(|t| t.label == l) {
            return Err(SentimentError::MissingClass(l));
        }
    }
    let terms: Vec<Vec<String>> = corpus.iter().map(|t| text_terms(&t.text)).collect();
    let tfidf = tfidf_fit(&terms, Unit::Word, (1, 1), config.max_terms)?;
    let x: Vec<Vec<f64>> = terms.iter().map(|t| tfidf.transform(t).values).collect();
    let y: Vec<&str> = corpus.iter().map(|t| t.label.name()).collect();
    let spec = ClassifierSpec {
        algorithm: Algorithm::LogisticRegression,
        hyperparams: config.hyperparams.clone(),
        seed,
        name: Some("sentiment".into()),
    };
    let classifier = train_classifier(&spec, &x, &y)?;
    SentimentModel::assemble(tfidf, classifier)
}

impl SentimentModel {
    fn assemble(tfidf: TfidfModel, classifier: ClassifierModel) -> Result<Self, SentimentError> {
        let mut columns = [0; 3];
        for l in SentimentLabel::ALL {
            columns[l.index()] = classifier
                .label_set
                .iter()
                .position(|s| s == l.name())
                .ok_or_else(|| SentimentError::Malformed(format!("classifier lacks label {l}")))?;
        }
        if classifier.label_set.len() != 3 || classifier.dim != tfidf.vocabulary.len() {
            return Err(SentimentError::Malformed("classifier does not match vectorizer".into()));
        }
        Ok(SentimentModel { tfidf, classifier, columns })
    }

    /// A text with no in-vocabulary term gets the uniform distribution.
    pub fn classify(&self, text: &str) -> Classified {
        let v = self.tfidf.transform(&text_terms(text)).values;
        let probabilities = if v.iter().all(|x| *x == 0.0) {
            [1.0 / 3.0; 3]
        } else {
            let p = self.classifier.predict_proba(&v).expect("dimension fixed at training").values;
            [p[self.columns[0]], p[self.columns[1]], p[self.columns[2]]]
        };
        Classified { label: SentimentLabel::ALL[argmax(&probabilities)], probabilities }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SentimentDoc {
            schema_version: SENTIMENT_SCHEMA_VERSION,
            tfidf: self.tfidf.to_doc(),
            classifier: self.classifier.clone(),
        })
        .expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, SentimentError> {
        let doc: SentimentDoc = serde_json::from_str(json).map_err(|e| SentimentError::Malformed(e.to_string()))?;
        if doc.schema_version != SENTIMENT_SCHEMA_VERSION {
            return Err(SentimentError::VersionMismatch(doc.schema_version));
        }
        Self::assemble(TfidfModel::from_doc(&doc.tfidf)?, doc.classifier)
    }

    pub fn save(&self, path: &Path) -> Result<(), SentimentError> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    pub fn load(path: &Path) -> Result<Self, SentimentError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn classify_sentiment(model: &SentimentModel, text: &str) -> Classified {
    model.classify(text)
}

/// Counts and shares of one cell; `shares` is `None` when the cell is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareCell {
    pub counts: [u64; 3],
    pub n: u64,
    pub shares: Option<[f64; 3]>,
}

impl ShareCell {
    fn from_counts(counts: [u64; 3]) -> Self {
        let n: u64 = counts.iter().sum();
        let shares = (n > 0).then(|| counts.map(|c| c as f64 / n as f64));
        ShareCell { counts, n, shares }
    }
}

/// Pooled shares of an axis side plus the unweighted mean of its populated
/// member types' shares.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisShareCell {
    pub pooled: ShareCell,
    pub mean_of_types: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharesReport {
    pub balanced: bool,
    pub n_tweets: u64,
    /// All 16 types, in label order.
    pub per_type: BTreeMap<PersonalityLabel, ShareCell>,
    pub per_axis: BTreeMap<AxisSide, AxisShareCell>,
}

/// Classifies every tweet (after optional balancing) and aggregates shares.
pub fn sentiment_shares(
    model: &SentimentModel,
    tweets: &[TweetRecord],
    balanced: bool,
    seed: u64,
) -> Result<SharesReport, SentimentError> {
    let records: Vec<TweetRecord> =
        if balanced { balance_by_type(tweets, seed)?.into_records() } else { tweets.to_vec() };
    let labels: Vec<SentimentLabel> = records.iter().map(|t| model.classify(&t.text).label).collect();
    Ok(shares_from_labels(records.iter().map(|t| t.label).zip(labels), balanced))
}

/// Aggregation step of [`sentiment_shares`] over pre-classified tweets.
pub fn shares_from_labels(
    labelled: impl IntoIterator<Item = (PersonalityLabel, SentimentLabel)>,
    balanced: bool,
) -> SharesReport {
    let mut counts: BTreeMap<PersonalityLabel, [u64; 3]> = PersonalityLabel::all().map(|l| (l, [0; 3])).collect();
    let mut n_tweets = 0;
    for (p, s) in labelled {
        counts.get_mut(&p).expect("all types present")[s.index()] += 1;
        n_tweets += 1;
    }
    let per_type: BTreeMap<PersonalityLabel, ShareCell> =
        counts.iter().map(|(l, c)| (*l, ShareCell::from_counts(*c))).collect();
    let per_axis = AxisSide::ALL
        .into_iter()
        .map(|side| {
            let mut pooled = [0u64; 3];
            let mut sum = [0.0; 3];
            let mut populated = 0;
            for l in side.members() {
                let cell = &per_type[&l];
                for (p, c) in pooled.iter_mut().zip(cell.counts) {
                    *p += c;
                }
                if let Some(s) = cell.shares {
                    populated += 1;
                    for k in 0..3 {
                        sum[k] += s[k];
                    }
                }
            }
            let mean_of_types = (populated > 0).then(|| sum.map(|v| v / populated as f64));
            (side, AxisShareCell { pooled: ShareCell::from_counts(pooled), mean_of_types })
        })
        .collect();
    SharesReport { balanced, n_tweets, per_type, per_axis }
}

impl SharesReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scope",
            "cell",
            "n",
            "positive",
            "negative",
            "neutral",
            "mean_of_types_positive",
            "mean_of_types_negative",
            "mean_of_types_neutral",
            "present",
        ])
        .expect("in-memory csv");
        let triple = |s: Option<[f64; 3]>| match s {
            Some(v) => v.map(|x| format!("{x:.6}")).to_vec(),
            None => vec![String::new(); 3],
        };
        for (l, c) in &self.per_type {
            let mut rec = vec!["type".to_string(), l.code(), c.n.to_string()];
            rec.extend(triple(c.shares));
            rec.extend(vec![String::new(); 3]);
            rec.push(c.shares.is_some().to_string());
            w.write_record(&rec).expect("in-memory csv");
        }
        for (side, c) in &self.per_axis {
            let mut rec = vec!["axis".to_string(), side.letter().to_string(), c.pooled.n.to_string()];
            rec.extend(triple(c.pooled.shares));
            rec.extend(triple(c.mean_of_types));
            rec.push(c.pooled.shares.is_some().to_string());
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Grouped bars of the three shares per type.
    pub fn to_svg(&self) -> String {
        let cats: Vec<String> = self.per_type.keys().map(|l| l.code()).collect();
        let series: Vec<Series> = SentimentLabel::ALL
            .into_iter()
            .map(|s| Series {
                name: s.name().to_string(),
                values: self.per_type.values().map(|c| c.shares.map(|v| v[s.index()])).collect(),
            })
            .collect();
        bar_chart("Sentiment shares per personality type", &cats, &series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TweetKind;

    fn tagged(text: &str, label: SentimentLabel) -> TaggedText {
        TaggedText { text: text.into(), label }
    }

    fn disjoint_corpus() -> Vec<TaggedText> {
        let words = [
            ("سعيد رائع جميل", SentimentLabel::Positive),
            ("حزين سيء مؤلم", SentimentLabel::Negative),
            ("خبر اليوم تقرير", SentimentLabel::Neutral),
        ];
        (0..30)
            .map(|i| {
                let (w, l) = words[i % 3];
                let ws: Vec<&str> = w.split(' ').collect();
                tagged(&format!("{} {}", ws[i % 3], ws[(i / 3) % 3]), l)
            })
            .collect()
    }

    #[test]
    fn disjoint_corpus_is_learned_exactly() {
        let corpus = disjoint_corpus();
        let m = train_sentiment(&corpus, &SentimentConfig::default(), 1).unwrap();
        for t in &corpus {
            let c = m.classify(&t.text);
            assert_eq!(c.label, t.label, "{}", t.text);
            assert!((c.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert_eq!(train_sentiment(&corpus, &SentimentConfig::default(), 1).unwrap(), m);
    }

    #[test]
    fn unknown_text_falls_back_to_uniform() {
        let m = train_sentiment(&disjoint_corpus(), &SentimentConfig::default(), 1).unwrap();
        for t in ["", "zzz qqq", "!!!"] {
            let c = m.classify(t);
            assert_eq!(c.probabilities, [1.0 / 3.0; 3]);
            assert_eq!(c.label, SentimentLabel::Positive);
        }
    }

    #[test]
    fn missing_class_is_reported() {
        let c: Vec<TaggedText> = disjoint_corpus().into_iter().filter(|t| t.label != SentimentLabel::Neutral).collect();
        assert!(matches!(
            train_sentiment(&c, &SentimentConfig::default(), 1),
            Err(SentimentError::MissingClass(SentimentLabel::Neutral))
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = train_sentiment(&disjoint_corpus(), &SentimentConfig::default(), 2).unwrap();
        let back = SentimentModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.classify("سعيد"), m.classify("سعيد"));
    }

    #[test]
    fn shares_sum_to_one_and_axis_is_pooled() {
        let pairs: Vec<(PersonalityLabel, SentimentLabel)> = (0..200)
            .filter(|i| i % 16 != 5)
            .map(|i| (PersonalityLabel::from_index(i % 16).unwrap(), SentimentLabel::ALL[(i * 7 / 3) % 3]))
            .collect();
        let r = shares_from_labels(pairs.clone(), false);
        assert!(r.per_type[&PersonalityLabel::from_index(5).unwrap()].shares.is_none());
        for c in r.per_type.values().filter_map(|c| c.shares) {
            assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        for (side, cell) in &r.per_axis {
            let mut brute = [0u64; 3];
            for (p, s) in &pairs {
                if p.has_side(*side) {
                    brute[s.index()] += 1;
                }
            }
            assert_eq!(cell.pooled.counts, brute);
        }
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 1 + 16 + 8);
    }

    #[test]
    fn all_positive_gives_unit_shares() {
        let m = train_sentiment(&disjoint_corpus(), &SentimentConfig::default(), 1).unwrap();
        let tweets: Vec<TweetRecord> = (0..32)
            .map(|i| TweetRecord {
                user_id: format!("u{i}"),
                text: "سعيد رائع".into(),
                kind: TweetKind::Tweet,
                label: PersonalityLabel::from_index(i % 16).unwrap(),
            })
            .collect();
        let r = sentiment_shares(&m, &tweets, true, 42).unwrap();
        assert_eq!(r.n_tweets, 32);
        assert!(r.per_type.values().all(|c| c.shares == Some([1.0, 0.0, 0.0])));
        assert!(matches!(sentiment_shares(&m, &tweets[..10], true, 42), Err(SentimentError::MissingType(_))));
    }
}
