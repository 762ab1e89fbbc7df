use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ClassifierModel, ModelError};

/// Accuracy, macro F1 and the confusion matrix on a labelled test set.
///
/// `labels` is the model's label set followed by any test-only labels in
/// sorted order; `confusion[true][predicted]` indexes into it. A class with
/// no support or no predictions has F1 = 0 and still counts in the macro
/// average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub f1_macro: f64,
    pub per_class_f1: BTreeMap<String, f64>,
    pub labels: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    pub averaging: String,
    pub n: usize,
}

pub fn evaluate<S: AsRef<str>>(model: &ClassifierModel, x: &[Vec<f64>], y: &[S]) -> Result<EvalReport, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyTestSet);
    }
    if x.len() != y.len() {
        return Err(ModelError::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let mut labels = model.label_set.clone();
    let mut extra: Vec<String> = y.iter().map(|s| s.as_ref().to_string()).filter(|s| !labels.contains(s)).collect();
    extra.sort();
    extra.dedup();
    labels.extend(extra);
    let index = |s: &str| labels.iter().position(|l| l == s).expect("label present");
    let k = labels.len();
    let mut confusion = vec![vec![0u64; k]; k];
    for (row, truth) in x.iter().zip(y) {
        let pred = model.predict_index(row)?;
        confusion[index(truth.as_ref())][pred] += 1;
    }
    Ok(report_from_confusion(labels, confusion))
}

/// Per-user evaluation: each user's label is the majority vote of its tweets'
/// predictions, ties going to the smallest label index.
pub fn evaluate_by_user<S: AsRef<str>, U: AsRef<str>>(
    model: &ClassifierModel,
    x: &[Vec<f64>],
    y: &[S],
    users: &[U],
) -> Result<EvalReport, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyTestSet);
    }
    if x.len() != y.len() || x.len() != users.len() {
        return Err(ModelError::DimensionMismatch { expected: x.len(), found: y.len().min(users.len()) });
    }
    let k = model.label_set.len();
    let mut per_user: BTreeMap<&str, (&str, Vec<u64>)> = BTreeMap::new();
    for ((row, truth), user) in x.iter().zip(y).zip(users) {
        let pred = model.predict_index(row)?;
        per_user.entry(user.as_ref()).or_insert_with(|| (truth.as_ref(), vec![0; k])).1[pred] += 1;
    }
    let mut labels = model.label_set.clone();
    let mut extra: Vec<String> =
        per_user.values().map(|(t, _)| t.to_string()).filter(|t| !labels.contains(t)).collect();
    extra.sort();
    extra.dedup();
    labels.extend(extra);
    let mut confusion = vec![vec![0u64; labels.len()]; labels.len()];
    for (truth, votes) in per_user.values() {
        let best = *votes.iter().max().expect("non-empty");
        let pred = votes.iter().position(|&v| v == best).expect("max present");
        let t = labels.iter().position(|l| l == truth).expect("label present");
        confusion[t][pred] += 1;
    }
    Ok(report_from_confusion(labels, confusion))
}

pub(crate) fn report_from_confusion(labels: Vec<String>, confusion: Vec<Vec<u64>>) -> EvalReport {
    let k = labels.len();
    let n: u64 = confusion.iter().flatten().sum();
    let correct: u64 = (0..k).map(|i| confusion[i][i]).sum();
    let mut per_class_f1 = BTreeMap::new();
    let mut sum = 0.0;
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let support: f64 = confusion[c].iter().sum::<u64>() as f64;
        let predicted: f64 = confusion.iter().map(|r| r[c]).sum::<u64>() as f64;
        let f1 = if tp == 0.0 { 0.0 } else { 2.0 * tp / (support + predicted) };
        sum += f1;
        per_class_f1.insert(labels[c].clone(), f1);
    }
    EvalReport {
        accuracy: correct as f64 / n as f64,
        f1_macro: sum / k as f64,
        per_class_f1,
        labels,
        confusion,
        averaging: "macro".into(),
        n: n as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn hand_computed_macro_f1() {
        // truth a: 3 (2 right, 1 as b); truth b: 2 (1 right, 1 as c); truth c: 1 right
        let conf = vec![vec![2, 1, 0], vec![0, 1, 1], vec![0, 0, 1]];
        let r = report_from_confusion(labels(&["a", "b", "c"]), conf);
        assert!((r.accuracy - 4.0 / 6.0).abs() < 1e-15);
        let fa = 2.0 * 2.0 / (3.0 + 2.0);
        let fb = 2.0 * 1.0 / (2.0 + 2.0);
        let fc = 2.0 * 1.0 / (1.0 + 2.0);
        assert!((r.f1_macro - (fa + fb + fc) / 3.0).abs() < 1e-15);
        assert_eq!(r.per_class_f1["b"], 0.5);
    }

    #[test]
    fn absent_class_scores_zero() {
        let conf = vec![vec![2, 0], vec![0, 0]];
        let r = report_from_confusion(labels(&["a", "b"]), conf);
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.per_class_f1["b"], 0.0);
        assert_eq!(r.f1_macro, 0.5);
    }

    #[test]
    fn majority_vote_per_user() {
        use super::super::{train_classifier, Algorithm, ClassifierSpec};
        let x = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let m = train_classifier(&ClassifierSpec::new(Algorithm::Knn).with("k", 1), &x, &["a", "b"]).unwrap();
        let tx = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        let ty = ["a", "a", "a", "b", "b"];
        let users = ["u1", "u1", "u1", "u2", "u2"];
        let r = evaluate_by_user(&m, &tx, &ty, &users).unwrap();
        // u1 votes a,a,b -> a (right); u2 votes b,a -> tie -> a (wrong)
        assert_eq!(r.n, 2);
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.confusion, vec![vec![1, 0], vec![1, 0]]);
    }
}
