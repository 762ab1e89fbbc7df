use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::embed::Word2VecParams;
use crate::models::{Algorithm, ClassifierSpec};
use crate::sentiment::SentimentConfig;
use crate::vectorize::FeatureConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Everything a run depends on. Command-line flags override file values and
/// the effective result is written next to the outputs as `config.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub users: Option<PathBuf>,
    pub tweets: Option<PathBuf>,
    pub tagged: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub test_fraction: f64,
    pub balance: bool,
    /// Feature configurations by name, e.g. `tfidf_char` or `bow+word2vec`.
    pub features: Vec<String>,
    pub max_terms: usize,
    pub bow_range: (usize, usize),
    pub ngram_range: (usize, usize),
    pub char_range: (usize, usize),
    pub embedding: Word2VecParams,
    /// Benchmark rows.
    pub classifiers: Vec<ClassifierSpec>,
    /// Feature configuration and classifier for `train`.
    pub feature: String,
    pub classifier: ClassifierSpec,
    pub sentiment: SentimentConfig,
    pub sentiment_model: Option<PathBuf>,
    pub stop_list: Option<PathBuf>,
    pub word_cloud_k: usize,
    /// Year ages are computed at; no age report without it.
    pub reference_year: Option<u16>,
    pub formats: Vec<Format>,
    /// Worker threads for benchmark cells; 0 uses the available parallelism.
    pub threads: usize,
}

fn named(alg: Algorithm, name: &str, hidden: &[usize]) -> ClassifierSpec {
    ClassifierSpec { name: Some(name.into()), ..ClassifierSpec::new(alg).with("hidden", hidden.to_vec()) }
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut classifiers: Vec<ClassifierSpec> = [
            Algorithm::NaiveBayes,
            Algorithm::LogisticRegression,
            Algorithm::LinearSvm,
            Algorithm::Knn,
            Algorithm::DecisionTree,
            Algorithm::RandomForest,
            Algorithm::GradientBoosting,
        ]
        .into_iter()
        .map(ClassifierSpec::new)
        .collect();
        classifiers.push(named(Algorithm::Mlp, "nn_shallow", &[100]));
        classifiers.push(named(Algorithm::Mlp, "ffdl", &[250, 250, 250]));
        let f = FeatureConfig::default();
        RunConfig {
            users: None,
            tweets: None,
            tagged: None,
            out: None,
            seed: 42,
            test_fraction: 0.2,
            balance: true,
            features: ["bow", "tfidf", "tfidf_ngram", "tfidf_char"].map(String::from).to_vec(),
            max_terms: f.max_terms,
            bow_range: f.bow_range,
            ngram_range: f.ngram_range,
            char_range: f.char_range,
            embedding: f.embedding,
            classifiers,
            feature: "tfidf".into(),
            classifier: ClassifierSpec::new(Algorithm::LogisticRegression),
            sentiment: SentimentConfig::default(),
            sentiment_model: None,
            stop_list: None,
            word_cloud_k: 20,
            reference_year: None,
            formats: vec![Format::Csv, Format::Json],
            threads: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn feature_config(&self, name: &str) -> Result<FeatureConfig, CliError> {
        let base = FeatureConfig::from_name(name)
            .ok_or_else(|| CliError::Usage(format!("unknown feature configuration {name:?}")))?;
        Ok(FeatureConfig {
            max_terms: self.max_terms,
            bow_range: self.bow_range,
            ngram_range: self.ngram_range,
            char_range: self.char_range,
            embedding: self.embedding.clone(),
            ..base
        })
    }

    pub fn feature_configs(&self) -> Result<Vec<FeatureConfig>, CliError> {
        self.features.iter().map(|n| self.feature_config(n)).collect()
    }

    /// Classifier specs with the run seed applied.
    pub fn seeded(&self, spec: &ClassifierSpec) -> ClassifierSpec {
        spec.clone().with_seed(self.seed)
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn require<'a>(&self, p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
        p.as_deref().ok_or_else(|| CliError::Usage(format!("missing {flag}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_json() {
        let c = RunConfig::default();
        let json = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
        assert_eq!(c.classifiers.len(), 9);
    }

    #[test]
    fn partial_files_fill_defaults_and_reject_unknown_keys() {
        let c: RunConfig = serde_json::from_str(r#"{"seed": 7, "features": ["bow"]}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.test_fraction, 0.2);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sede": 7}"#).is_err());
    }

    #[test]
    fn feature_settings_propagate() {
        let c = RunConfig { max_terms: 50, ..Default::default() };
        let f = c.feature_config("tfidf_char+word2vec").unwrap();
        assert_eq!(f.max_terms, 50);
        assert!(f.word2vec);
        assert!(c.feature_config("glove").is_err());
    }
}
