use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Algorithm, ModelError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbParams {
    pub alpha: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams { alpha: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            learning_rate: 0.01,
            epochs: 100,
            batch_size: 32,
            l2: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { learning_rate: 0.1, epochs: 20, l2: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

/// Features considered at each split: `"all"`, `"sqrt"` or a count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaxFeatures {
    Count(usize),
    Rule(FeatureRule),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureRule {
    All,
    Sqrt,
}

impl MaxFeatures {
    pub const ALL: MaxFeatures = MaxFeatures::Rule(FeatureRule::All);
    pub const SQRT: MaxFeatures = MaxFeatures::Rule(FeatureRule::Sqrt);

    pub fn resolve(self, dim: usize) -> usize {
        let k = match self {
            MaxFeatures::Count(k) => k,
            MaxFeatures::Rule(FeatureRule::All) => dim,
            MaxFeatures::Rule(FeatureRule::Sqrt) => (dim as f64).sqrt().round() as usize,
        };
        k.clamp(1, dim.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_samples_split: 2, min_samples_leaf: 1, max_features: MaxFeatures::ALL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::SQRT,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn tree(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
            max_features: self.max_features,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams { n_estimators: 50, learning_rate: 0.1, max_depth: 3, min_samples_leaf: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: vec![100],
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 32,
            batch_size: 32,
        }
    }
}

impl MlpParams {
    /// One hidden layer of 100 ReLU units.
    pub fn nn_shallow() -> Self {
        MlpParams::default()
    }

    /// Three hidden layers of 250 ReLU units.
    pub fn ffdl() -> Self {
        MlpParams { hidden: vec![250, 250, 250], ..MlpParams::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    NaiveBayes(NbParams),
    LogisticRegression(LogRegParams),
    LinearSvm(SvmParams),
    Knn(KnnParams),
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    GradientBoosting(BoostParams),
    Mlp(MlpParams),
}

fn decode<T: DeserializeOwned>(
    algorithm: Algorithm,
    map: &serde_json::Map<String, serde_json::Value>,
) -> Result<T, ModelError> {
    serde_json::from_value(serde_json::Value::Object(map.clone()))
        .map_err(|e| ModelError::InvalidHyperparams { algorithm, message: e.to_string() })
}

fn adam_ok(lr: f64, b1: f64, b2: f64, eps: f64) -> bool {
    lr > 0.0 && (0.0..1.0).contains(&b1) && (0.0..1.0).contains(&b2) && eps > 0.0
}

impl Params {
    pub fn parse(algorithm: Algorithm, map: &serde_json::Map<String, serde_json::Value>) -> Result<Params, ModelError> {
        let params = match algorithm {
            Algorithm::NaiveBayes => Params::NaiveBayes(decode(algorithm, map)?),
            Algorithm::LogisticRegression => Params::LogisticRegression(decode(algorithm, map)?),
            Algorithm::LinearSvm => Params::LinearSvm(decode(algorithm, map)?),
            Algorithm::Knn => Params::Knn(decode(algorithm, map)?),
            Algorithm::DecisionTree => Params::DecisionTree(decode(algorithm, map)?),
            Algorithm::RandomForest => Params::RandomForest(decode(algorithm, map)?),
            Algorithm::GradientBoosting => Params::GradientBoosting(decode(algorithm, map)?),
            Algorithm::Mlp => Params::Mlp(decode(algorithm, map)?),
        };
        if let Some(message) = params.problem() {
            return Err(ModelError::InvalidHyperparams { algorithm, message: message.into() });
        }
        Ok(params)
    }

    fn problem(&self) -> Option<&'static str> {
        let tree_ok = |depth: Option<usize>, split: usize, leaf: usize, mf: MaxFeatures| {
            depth != Some(0) && split >= 2 && leaf >= 1 && mf != MaxFeatures::Count(0)
        };
        match self {
            Params::NaiveBayes(p) if !(p.alpha > 0.0) => Some("alpha must be positive"),
            Params::LogisticRegression(p) if !adam_ok(p.learning_rate, p.beta1, p.beta2, p.epsilon) => {
                Some("learning_rate, beta1, beta2 or epsilon out of range")
            }
            Params::LogisticRegression(p) if p.epochs == 0 || p.batch_size == 0 || !(p.l2 >= 0.0) => {
                Some("epochs and batch_size must be >= 1 and l2 >= 0")
            }
            Params::LinearSvm(p) if !(p.learning_rate > 0.0) || p.epochs == 0 || !(p.l2 >= 0.0) => {
                Some("learning_rate > 0, epochs >= 1 and l2 >= 0 required")
            }
            Params::Knn(p) if p.k == 0 => Some("k must be at least 1"),
            Params::DecisionTree(p)
                if !tree_ok(p.max_depth, p.min_samples_split, p.min_samples_leaf, p.max_features) =>
            {
                Some("max_depth, min_samples_split, min_samples_leaf or max_features out of range")
            }
            Params::RandomForest(p)
                if p.n_trees == 0 || !tree_ok(p.max_depth, p.min_samples_split, p.min_samples_leaf, p.max_features) =>
            {
                Some("n_trees >= 1 and valid tree parameters required")
            }
            Params::GradientBoosting(p)
                if p.n_estimators == 0 || !(p.learning_rate > 0.0) || p.max_depth == 0 || p.min_samples_leaf == 0 =>
            {
                Some("n_estimators, learning_rate, max_depth and min_samples_leaf must be positive")
            }
            Params::Mlp(p) if p.hidden.contains(&0) => Some("hidden widths must be at least 1"),
            Params::Mlp(p) if p.epochs == 0 || p.batch_size == 0 => Some("epochs and batch_size must be >= 1"),
            Params::Mlp(p) if !adam_ok(p.learning_rate, p.beta1, p.beta2, p.epsilon) => {
                Some("learning_rate, beta1, beta2 or epsilon out of range")
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn map(v: serde_json::Value) -> serde_json::Map<String, serde_json::Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn defaults_and_overrides() {
        let p = Params::parse(Algorithm::Mlp, &map(json!({}))).unwrap();
        assert_eq!(p, Params::Mlp(MlpParams::nn_shallow()));
        let p = Params::parse(Algorithm::Mlp, &map(json!({"hidden": [250, 250, 250]}))).unwrap();
        assert_eq!(p, Params::Mlp(MlpParams::ffdl()));
        let p = Params::parse(Algorithm::RandomForest, &map(json!({"max_features": "all", "n_trees": 3}))).unwrap();
        match p {
            Params::RandomForest(f) => assert_eq!(f.max_features, MaxFeatures::ALL),
            _ => unreachable!(),
        }
        let p = Params::parse(Algorithm::DecisionTree, &map(json!({"max_features": 4}))).unwrap();
        assert_eq!(p, Params::DecisionTree(TreeParams { max_features: MaxFeatures::Count(4), ..Default::default() }));
    }

    #[test]
    fn rejects_bad_values() {
        for (alg, v) in [
            (Algorithm::NaiveBayes, json!({"alpha": 0.0})),
            (Algorithm::Mlp, json!({"hidden": [3, 0]})),
            (Algorithm::Mlp, json!({"learning_rate": -1.0})),
            (Algorithm::LogisticRegression, json!({"epochs": 0})),
            (Algorithm::GradientBoosting, json!({"max_depth": 0})),
            (Algorithm::RandomForest, json!({"n_trees": 0})),
            (Algorithm::DecisionTree, json!({"max_features": "half"})),
            (Algorithm::Knn, json!({"k": "five"})),
        ] {
            assert!(Params::parse(alg, &map(v.clone())).is_err(), "{alg} {v}");
        }
    }

    #[test]
    fn sqrt_features() {
        assert_eq!(MaxFeatures::SQRT.resolve(1000), 32);
        assert_eq!(MaxFeatures::SQRT.resolve(1), 1);
        assert_eq!(MaxFeatures::Count(50).resolve(10), 10);
    }
}
