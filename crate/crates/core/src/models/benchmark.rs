use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{evaluate, train_classifier, ClassifierSpec, ModelError};
use crate::corpus::{balance_by_type, split_train_test, TweetRecord};
use crate::vectorize::{FeatureConfig, Featurizer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkOptions {
    pub test_fraction: f64,
    pub seed: u64,
    /// Downsample every type to the smallest type's count first.
    pub balance: bool,
    /// Worker threads for independent cells; 0 uses the available parallelism.
    pub threads: usize,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions { test_fraction: 0.2, seed: 42, balance: true, threads: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub algorithm: String,
    pub feature: String,
    pub accuracy: Option<f64>,
    pub f1_macro: Option<f64>,
    pub input_dim: usize,
    /// Why the cell could not be trained, e.g. negative features for naive Bayes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Rows are algorithms, columns feature configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub algorithms: Vec<String>,
    pub features: Vec<String>,
    /// Row-major `algorithms × features`.
    pub cells: Vec<BenchmarkCell>,
    pub seed: u64,
    pub test_fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub averaging: String,
    /// `(algorithm, feature)` of the highest accuracy; the first one wins ties.
    pub best: Option<(String, String)>,
}

impl BenchmarkTable {
    pub fn cell(&self, algorithm: &str, feature: &str) -> Option<&BenchmarkCell> {
        self.cells.iter().find(|c| c.algorithm == algorithm && c.feature == feature)
    }

    fn row(&self, a: usize) -> &[BenchmarkCell] {
        let w = self.features.len();
        &self.cells[a * w..(a + 1) * w]
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["algorithm".to_string()];
        for f in &self.features {
            header.push(format!("{f}_accuracy"));
            header.push(format!("{f}_f1_macro"));
        }
        header.push("best_feature".into());
        header.push("overall_best".into());
        w.write_record(&header).expect("in-memory csv");
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for (a, name) in self.algorithms.iter().enumerate() {
            let row = self.row(a);
            let mut rec = vec![name.clone()];
            for c in row {
                rec.push(fmt(c.accuracy));
                rec.push(fmt(c.f1_macro));
            }
            rec.push(best_of(row).map(|c| c.feature.clone()).unwrap_or_default());
            let overall = match &self.best {
                Some((alg, feat)) if alg == name => feat.clone(),
                _ => String::new(),
            };
            rec.push(overall);
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

fn best_of<'a>(cells: impl IntoIterator<Item = &'a BenchmarkCell>) -> Option<&'a BenchmarkCell> {
    let mut best: Option<&BenchmarkCell> = None;
    for c in cells {
        if let Some(acc) = c.accuracy {
            if best.is_none_or(|b| acc > b.accuracy.expect("scored")) {
                best = Some(c);
            }
        }
    }
    best
}

/// Balance, split, fit each feature configuration on the training part only,
/// then train and evaluate every classifier on it.
///
/// Cells run on worker threads; each is a pure function of its inputs so the
/// table equals a sequential run.
pub fn run_benchmark(
    tweets: &[TweetRecord],
    features: &[FeatureConfig],
    specs: &[ClassifierSpec],
    options: &BenchmarkOptions,
) -> Result<BenchmarkTable, ModelError> {
    let records = if options.balance { balance_by_type(tweets, options.seed)?.into_records() } else { tweets.to_vec() };
    let labels: Vec<String> = records.iter().map(|r| r.label.code()).collect();
    let split = split_train_test(&labels, options.test_fraction, options.seed)?;
    let train_text: Vec<&str> = split.train.iter().map(|&i| records[i].text.as_str()).collect();
    let test_text: Vec<&str> = split.test.iter().map(|&i| records[i].text.as_str()).collect();
    let train_y: Vec<&str> = split.train.iter().map(|&i| labels[i].as_str()).collect();
    let test_y: Vec<&str> = split.test.iter().map(|&i| labels[i].as_str()).collect();

    let mut matrices = Vec::with_capacity(features.len());
    for cfg in features {
        let f = Featurizer::fit(cfg, &train_text, options.seed)?;
        matrices.push((f.dim(), f.transform_all(&train_text), f.transform_all(&test_text)));
    }

    let jobs: Vec<(usize, usize)> = (0..specs.len()).flat_map(|a| (0..features.len()).map(move |f| (a, f))).collect();
    let results: Mutex<Vec<Option<BenchmarkCell>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let threads = match options.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(a, f)) = jobs.get(j) else { break };
                let (dim, xtr, xte) = &matrices[f];
                let outcome = train_classifier(&specs[a], xtr, &train_y).and_then(|m| evaluate(&m, xte, &test_y));
                let cell = BenchmarkCell {
                    algorithm: specs[a].display_name(),
                    feature: features[f].name(),
                    accuracy: outcome.as_ref().ok().map(|r| r.accuracy),
                    f1_macro: outcome.as_ref().ok().map(|r| r.f1_macro),
                    input_dim: *dim,
                    error: outcome.err().map(|e| e.to_string()),
                };
                results.lock().expect("no poisoned workers")[j] = Some(cell);
            });
        }
    });
    let cells: Vec<BenchmarkCell> =
        results.into_inner().expect("workers joined").into_iter().map(|c| c.expect("every job ran")).collect();
    let best = best_of(&cells).map(|c| (c.algorithm.clone(), c.feature.clone()));
    Ok(BenchmarkTable {
        algorithms: specs.iter().map(|s| s.display_name()).collect(),
        features: features.iter().map(|f| f.name()).collect(),
        cells,
        seed: options.seed,
        test_fraction: options.test_fraction,
        n_train: split.train.len(),
        n_test: split.test.len(),
        averaging: "macro".into(),
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synthetic::{generate_synthetic, SyntheticSpec};
    use crate::models::Algorithm;
    use crate::vectorize::TextFeature;

    fn corpus() -> Vec<TweetRecord> {
        generate_synthetic(&SyntheticSpec::disjoint(20, 2, 12), 5).unwrap().1
    }

    #[test]
    fn grid_shape_best_marker_and_determinism() {
        let tweets = corpus();
        let feats = [FeatureConfig::new(TextFeature::Bow, false), FeatureConfig::new(TextFeature::Tfidf, false)];
        let specs = [
            ClassifierSpec::new(Algorithm::NaiveBayes),
            ClassifierSpec::new(Algorithm::RandomForest).with("n_trees", 10),
        ];
        let t = run_benchmark(&tweets, &feats, &specs, &BenchmarkOptions::default()).unwrap();
        assert_eq!(t.cells.len(), 4);
        assert_eq!(t.n_train + t.n_test, 320);
        assert_eq!(t.n_test, 16 * 4);
        let best = best_of(&t.cells).unwrap();
        assert!(t.cells.iter().all(|c| c.accuracy.unwrap() <= best.accuracy.unwrap()));
        let csv = t.to_csv();
        assert!(csv.starts_with(
            "algorithm,bow_accuracy,bow_f1_macro,tfidf_accuracy,tfidf_f1_macro,best_feature,overall_best\n"
        ));
        let seq =
            run_benchmark(&tweets, &feats, &specs, &BenchmarkOptions { threads: 1, ..Default::default() }).unwrap();
        assert_eq!(seq.to_csv(), csv);
        assert_eq!(seq, t);
    }

    #[test]
    fn naive_bayes_on_embeddings_is_reported_not_fatal() {
        let tweets = corpus();
        let mut cfg = FeatureConfig::new(TextFeature::None, true);
        cfg.embedding.min_count = 1;
        cfg.embedding.dim = 8;
        cfg.embedding.epochs = 1;
        let t =
            run_benchmark(&tweets, &[cfg], &[ClassifierSpec::new(Algorithm::NaiveBayes)], &Default::default()).unwrap();
        assert!(t.cells[0].error.as_deref().unwrap().contains("non-negative"));
        assert!(t.best.is_none());
        assert!(t.to_csv().lines().nth(1).unwrap().starts_with("naive_bayes,,,"));
    }
}
