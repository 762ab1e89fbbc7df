//! From-scratch classifiers behind one train / predict / evaluate / persist
//! contract.
//!
//! Labels are plain strings at the API boundary; internally every algorithm
//! works on class indices into the model's sorted `label_set`. All training
//! runs in `f64` and is a pure function of data, hyperparameters and seed.

pub mod benchmark;
mod eval;
mod knn;
mod linear;
pub mod mlp;
mod naive_bayes;
mod optim;
mod params;
mod persist;
mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use benchmark::{run_benchmark, BenchmarkCell, BenchmarkOptions, BenchmarkTable};
pub use eval::{evaluate, evaluate_by_user, EvalReport};
pub use mlp::{gradient_check, gradient_check_with_step, GradientCheck, MlpArchitecture};
pub use params::{
    BoostParams, ForestParams, KnnParams, LogRegParams, MaxFeatures, MlpParams, NbParams, Params, SvmParams, TreeParams,
};
pub use persist::{load_model, read_model, save_model, write_model, MODEL_SCHEMA_VERSION};

use crate::util::argmax;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("feature vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training data has fewer than two distinct labels")]
    SingleClass,
    #[error("naive Bayes needs non-negative features (row {row}, column {column})")]
    NegativeFeature { row: usize, column: usize },
    #[error("non-finite feature value")]
    NonFiniteFeature,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("invalid hyperparameters for {algorithm}: {message}")]
    InvalidHyperparams { algorithm: Algorithm, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported model schema version {found} (this build reads {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Vectorize(#[from] crate::vectorize::VectorizeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NaiveBayes,
    LogisticRegression,
    LinearSvm,
    Knn,
    DecisionTree,
    RandomForest,
    GradientBoosting,
    Mlp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::NaiveBayes,
        Algorithm::LogisticRegression,
        Algorithm::LinearSvm,
        Algorithm::Knn,
        Algorithm::DecisionTree,
        Algorithm::RandomForest,
        Algorithm::GradientBoosting,
        Algorithm::Mlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::LogisticRegression => "logistic_regression",
            Algorithm::LinearSvm => "linear_svm",
            Algorithm::Knn => "knn",
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::RandomForest => "random_forest",
            Algorithm::GradientBoosting => "gradient_boosting",
            Algorithm::Mlp => "mlp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub(crate) fn tag(self) -> u8 {
        self as u8
    }

    /// Whether `predict_proba` is a calibrated distribution rather than
    /// normalized scores or vote fractions.
    pub fn calibrated(self) -> bool {
        !matches!(self, Algorithm::LinearSvm | Algorithm::Knn)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which algorithm to train, its hyperparameters and the seed.
///
/// `hyperparams` is a free-form JSON object, checked against the algorithm's
/// parameter set before training; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub hyperparams: serde_json::Map<String, serde_json::Value>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Display name for reports; defaults to the algorithm name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn default_seed() -> u64 {
    42
}

impl ClassifierSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        ClassifierSpec { algorithm, hyperparams: Default::default(), seed: 42, name: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.hyperparams.insert(key.to_string(), value.into());
        self
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.algorithm.name().to_string())
    }

    /// Validated, typed hyperparameters.
    pub fn params(&self) -> Result<Params, ModelError> {
        Params::parse(self.algorithm, &self.hyperparams)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub(crate) enum Learned {
    NaiveBayes(naive_bayes::NaiveBayes),
    Softmax(linear::Softmax),
    LinearSvm(linear::LinearSvm),
    Knn(knn::Knn),
    Tree(tree::Tree),
    Forest(tree::Forest),
    Boosting(tree::Boosting),
    Mlp(mlp::Mlp),
}

/// A trained predictor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub spec: ClassifierSpec,
    pub label_set: Vec<String>,
    pub dim: usize,
    pub(crate) learned: Learned,
    /// Free-form provenance, e.g. the fingerprint of the featurizer.
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// Class distribution returned by [`ClassifierModel::predict_proba`].
#[derive(Clone, Debug, PartialEq)]
pub struct Probabilities {
    pub values: Vec<f64>,
    /// `false` for normalized SVM margins and kNN vote fractions.
    pub calibrated: bool,
}

pub(crate) struct Encoded {
    pub y: Vec<usize>,
    pub n_classes: usize,
}

fn check_rows(x: &[Vec<f64>], dim: usize) -> Result<(), ModelError> {
    for row in x {
        if row.len() != dim {
            return Err(ModelError::DimensionMismatch { expected: dim, found: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteFeature);
        }
    }
    Ok(())
}

/// Trains one classifier on `(x[i], labels[i])` pairs.
pub fn train_classifier<S: AsRef<str>>(
    spec: &ClassifierSpec,
    x: &[Vec<f64>],
    labels: &[S],
) -> Result<ClassifierModel, ModelError> {
    let params = spec.params()?;
    if x.len() != labels.len() {
        return Err(ModelError::DimensionMismatch { expected: x.len(), found: labels.len() });
    }
    let label_set: Vec<String> =
        labels.iter().map(|l| l.as_ref().to_string()).collect::<BTreeSet<_>>().into_iter().collect();
    if label_set.len() < 2 {
        return Err(ModelError::SingleClass);
    }
    let dim = x[0].len();
    check_rows(x, dim)?;
    let y = labels.iter().map(|l| label_set.binary_search_by(|s| s.as_str().cmp(l.as_ref())).unwrap()).collect();
    let data = Encoded { y, n_classes: label_set.len() };
    let learned = match params {
        Params::NaiveBayes(p) => Learned::NaiveBayes(naive_bayes::NaiveBayes::fit(&p, x, &data)?),
        Params::LogisticRegression(p) => Learned::Softmax(linear::Softmax::fit(&p, x, &data, spec.seed)),
        Params::LinearSvm(p) => Learned::LinearSvm(linear::LinearSvm::fit(&p, x, &data, spec.seed)),
        Params::Knn(p) => Learned::Knn(knn::Knn::fit(&p, x, &data)),
        Params::DecisionTree(p) => Learned::Tree(tree::Tree::fit_classifier(&p, x, &data, spec.seed)),
        Params::RandomForest(p) => Learned::Forest(tree::Forest::fit(&p, x, &data, spec.seed)),
        Params::GradientBoosting(p) => Learned::Boosting(tree::Boosting::fit(&p, x, &data)),
        Params::Mlp(p) => Learned::Mlp(mlp::Mlp::fit(&p, x, &data, spec.seed)),
    };
    Ok(ClassifierModel { spec: spec.clone(), label_set, dim, learned, metadata: BTreeMap::new() })
}

impl ClassifierModel {
    fn check(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.dim {
            return Err(ModelError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    fn distribution(&self, x: &[f64]) -> Vec<f64> {
        match &self.learned {
            Learned::NaiveBayes(m) => m.proba(x),
            Learned::Softmax(m) => m.proba(x),
            Learned::LinearSvm(m) => m.proba(x),
            Learned::Knn(m) => m.proba(x),
            Learned::Tree(m) => m.predict_value(x).to_vec(),
            Learned::Forest(m) => m.proba(x),
            Learned::Boosting(m) => m.proba(x),
            Learned::Mlp(m) => m.proba(x),
        }
    }

    pub fn predict_index(&self, x: &[f64]) -> Result<usize, ModelError> {
        self.check(x)?;
        Ok(argmax(&self.distribution(x)))
    }

    pub fn predict(&self, x: &[f64]) -> Result<&str, ModelError> {
        Ok(&self.label_set[self.predict_index(x)?])
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Probabilities, ModelError> {
        self.check(x)?;
        Ok(Probabilities { values: self.distribution(x), calibrated: self.spec.algorithm.calibrated() })
    }

    /// Per-class log joint likelihoods; only for naive Bayes.
    pub fn log_joint(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.learned {
            Learned::NaiveBayes(m) => Some(m.log_joint(x)),
            _ => None,
        }
    }
}

pub fn predict<'m>(model: &'m ClassifierModel, x: &[f64]) -> Result<&'m str, ModelError> {
    model.predict(x)
}

pub fn predict_proba(model: &ClassifierModel, x: &[f64]) -> Result<Probabilities, ModelError> {
    model.predict_proba(x)
}
