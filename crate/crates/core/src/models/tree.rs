//! CART trees, random forests and gradient boosting.
//!
//! Split search walks per-feature columns of non-zero values sorted once per
//! fit; all zeros of a node form one group whose statistics are the node
//! total minus the non-zero entries. A sample with `x[f] <= threshold` goes
//! left. Among equally good splits the lowest feature index and then the
//! smallest threshold wins.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BoostParams, Encoded, ForestParams, MaxFeatures, TreeParams};
use crate::util::{argmax, rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub(crate) enum Node {
    Leaf { value: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct Tree {
    nodes: Vec<Node>,
}

/// Non-zero `(value, row)` pairs of every column, sorted by value then row.
struct Columns(Vec<Vec<(f64, u32)>>);

impl Columns {
    fn new(x: &[Vec<f64>]) -> Self {
        let d = x.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); d];
        for (i, row) in x.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    cols[j].push((v, i as u32));
                }
            }
        }
        for c in &mut cols {
            c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        Columns(cols)
    }
}

#[derive(Clone, Copy)]
enum Target<'a> {
    Class { y: &'a [usize], k: usize },
    Value(&'a [f64]),
}

#[derive(Clone, Debug)]
struct Stats {
    w: f64,
    counts: Vec<f64>,
    sum: f64,
    sumsq: f64,
}

impl Stats {
    fn empty(target: Target) -> Self {
        let k = match target {
            Target::Class { k, .. } => k,
            Target::Value(_) => 0,
        };
        Stats { w: 0.0, counts: vec![0.0; k], sum: 0.0, sumsq: 0.0 }
    }

    fn add(&mut self, target: Target, i: usize, w: f64) {
        self.w += w;
        match target {
            Target::Class { y, .. } => self.counts[y[i]] += w,
            Target::Value(v) => {
                self.sum += w * v[i];
                self.sumsq += w * v[i] * v[i];
            }
        }
    }

    fn add_stats(&mut self, o: &Stats, sign: f64) {
        self.w += sign * o.w;
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += sign * b;
        }
        self.sum += sign * o.sum;
        self.sumsq += sign * o.sumsq;
    }

    /// Node weight times Gini impurity, or sum of squared errors.
    fn impurity(&self, target: Target) -> f64 {
        if self.w <= 0.0 {
            return 0.0;
        }
        match target {
            Target::Class { .. } => self.w - self.counts.iter().map(|c| c * c).sum::<f64>() / self.w,
            Target::Value(_) => (self.sumsq - self.sum * self.sum / self.w).max(0.0),
        }
    }

    /// Impurity of `self - left` without allocating.
    fn rest_impurity(&self, left: &Stats, target: Target) -> f64 {
        let w = self.w - left.w;
        if w <= 0.0 {
            return 0.0;
        }
        match target {
            Target::Class { .. } => {
                w - self.counts.iter().zip(&left.counts).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / w
            }
            Target::Value(_) => {
                let s = self.sum - left.sum;
                (self.sumsq - left.sumsq - s * s / w).max(0.0)
            }
        }
    }

    fn leaf_value(&self, target: Target) -> Vec<f64> {
        match target {
            Target::Class { .. } => self.counts.iter().map(|c| c / self.w).collect(),
            Target::Value(_) => vec![self.sum / self.w],
        }
    }
}

struct Limits {
    max_depth: Option<usize>,
    min_split: f64,
    min_leaf: f64,
    n_features: usize,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    cols: &'a Columns,
    target: Target<'a>,
    weights: &'a [u32],
    limits: Limits,
    rng: Option<&'a mut ChaCha8Rng>,
    in_node: Vec<bool>,
    nodes: Vec<Node>,
}

fn better(crit: f64, best: f64) -> bool {
    crit < best - 1e-12 * best.abs().max(1.0)
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

impl Builder<'_> {
    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let mut stats = Stats::empty(self.target);
        for &i in &idx {
            stats.add(self.target, i, self.weights[i] as f64);
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: stats.leaf_value(self.target) });
        let parent = stats.impurity(self.target);
        if self.limits.max_depth.is_some_and(|m| depth >= m) || stats.w < self.limits.min_split || parent <= 1e-12 {
            return id;
        }
        for &i in &idx {
            self.in_node[i] = true;
        }
        let d = self.cols.0.len();
        let features: Vec<usize> = match self.rng.as_deref_mut() {
            Some(r) if self.limits.n_features < d => {
                let mut f = rand::seq::index::sample(r, d, self.limits.n_features).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        };
        let mut best: Option<(f64, usize, f64)> = None;
        for f in features {
            if let Some((crit, thr)) = self.best_on_feature(f, &stats) {
                if best.is_none_or(|(b, _, _)| better(crit, b)) {
                    best = Some((crit, f, thr));
                }
            }
        }
        for &i in &idx {
            self.in_node[i] = false;
        }
        match best {
            Some((crit, feature, threshold)) if better(crit, parent) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| self.x[i][feature] <= threshold);
                let left = self.build(l, depth + 1);
                let right = self.build(r, depth + 1);
                self.nodes[id] = Node::Split { feature, threshold, left, right };
            }
            _ => {}
        }
        id
    }

    fn best_on_feature(&self, f: usize, node: &Stats) -> Option<(f64, f64)> {
        let t = self.target;
        let mut seq: Vec<(f64, Option<usize>)> = Vec::new();
        let mut nonzero = Stats::empty(t);
        let mut zero_at = None;
        for &(v, i) in &self.cols.0[f] {
            let i = i as usize;
            if self.in_node[i] {
                if v > 0.0 && zero_at.is_none() {
                    zero_at = Some(seq.len());
                }
                seq.push((v, Some(i)));
                nonzero.add(t, i, self.weights[i] as f64);
            }
        }
        let mut zeros = node.clone();
        zeros.add_stats(&nonzero, -1.0);
        if zeros.w > 0.5 {
            seq.insert(zero_at.unwrap_or(seq.len()), (0.0, None));
        }
        let mut left = Stats::empty(t);
        let mut best: Option<(f64, f64)> = None;
        for p in 0..seq.len().saturating_sub(1) {
            match seq[p].1 {
                Some(i) => left.add(t, i, self.weights[i] as f64),
                None => left.add_stats(&zeros, 1.0),
            }
            let (a, b) = (seq[p].0, seq[p + 1].0);
            if a >= b || left.w < self.limits.min_leaf || node.w - left.w < self.limits.min_leaf {
                continue;
            }
            let crit = left.impurity(t) + node.rest_impurity(&left, t);
            if best.is_none_or(|(c, _)| better(crit, c)) {
                best = Some((crit, midpoint(a, b)));
            }
        }
        best
    }
}

fn grow(
    x: &[Vec<f64>],
    cols: &Columns,
    target: Target,
    weights: &[u32],
    limits: Limits,
    rng: Option<&mut ChaCha8Rng>,
) -> Tree {
    let idx: Vec<usize> = (0..x.len()).filter(|&i| weights[i] > 0).collect();
    let mut b = Builder { x, cols, target, weights, limits, rng, in_node: vec![false; x.len()], nodes: Vec::new() };
    b.build(idx, 0);
    Tree { nodes: b.nodes }
}

fn limits(p: &TreeParams, d: usize) -> Limits {
    Limits {
        max_depth: p.max_depth,
        min_split: p.min_samples_split as f64,
        min_leaf: p.min_samples_leaf as f64,
        n_features: p.max_features.resolve(d),
    }
}

impl Tree {
    pub fn fit_classifier(p: &TreeParams, x: &[Vec<f64>], data: &Encoded, seed: u64) -> Self {
        let cols = Columns::new(x);
        let mut r = rng(seed);
        let target = Target::Class { y: &data.y, k: data.n_classes };
        grow(x, &cols, target, &vec![1; x.len()], limits(p, x[0].len()), Some(&mut r))
    }

    pub fn predict_value(&self, x: &[f64]) -> &[f64] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    id = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    #[cfg(test)]
    fn depth(&self) -> usize {
        fn go(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    #[cfg(test)]
    fn root(&self) -> &Node {
        &self.nodes[0]
    }
}

/// Bagged CART trees; `predict_proba` returns hard-vote fractions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct Forest {
    n_classes: usize,
    trees: Vec<Tree>,
}

impl Forest {
    pub fn fit(p: &ForestParams, x: &[Vec<f64>], data: &Encoded, seed: u64) -> Self {
        let cols = Columns::new(x);
        let n = x.len();
        let target = Target::Class { y: &data.y, k: data.n_classes };
        let mut master = rng(seed);
        let trees = (0..p.n_trees)
            .map(|_| {
                let mut r = rng(master.next_u64());
                let mut weights = vec![if p.bootstrap { 0 } else { 1 }; n];
                if p.bootstrap {
                    for _ in 0..n {
                        weights[r.random_range(0..n)] += 1;
                    }
                }
                grow(x, &cols, target, &weights, limits(&p.tree(), x[0].len()), Some(&mut r))
            })
            .collect();
        Forest { n_classes: data.n_classes, trees }
    }

    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for t in &self.trees {
            votes[argmax(t.predict_value(x))] += 1.0;
        }
        votes.iter_mut().for_each(|v| *v /= self.trees.len() as f64);
        votes
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// One-vs-rest gradient boosting on logistic loss with regression trees.
///
/// Each round fits, per class, a tree to the residual `y - sigmoid(F)`; leaf
/// values are residual means (first order) scaled by the learning rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct Boosting {
    learning_rate: f64,
    init: Vec<f64>,
    /// `trees[class][round]`
    trees: Vec<Vec<Tree>>,
}

impl Boosting {
    pub fn fit(p: &BoostParams, x: &[Vec<f64>], data: &Encoded) -> Self {
        let (n, k) = (x.len(), data.n_classes);
        let cols = Columns::new(x);
        let weights = vec![1; n];
        let tree_params = TreeParams {
            max_depth: Some(p.max_depth),
            min_samples_leaf: p.min_samples_leaf,
            max_features: MaxFeatures::ALL,
            ..Default::default()
        };
        let init: Vec<f64> = (0..k)
            .map(|c| {
                let prior = data.y.iter().filter(|&&y| y == c).count() as f64 / n as f64;
                (prior / (1.0 - prior)).ln()
            })
            .collect();
        let mut f: Vec<Vec<f64>> = init.iter().map(|&v| vec![v; n]).collect();
        let mut trees: Vec<Vec<Tree>> = vec![Vec::with_capacity(p.n_estimators); k];
        let mut residual = vec![0.0; n];
        for _ in 0..p.n_estimators {
            for c in 0..k {
                for i in 0..n {
                    residual[i] = (data.y[i] == c) as u8 as f64 - sigmoid(f[c][i]);
                }
                let tree = grow(x, &cols, Target::Value(&residual), &weights, limits(&tree_params, x[0].len()), None);
                for (i, row) in x.iter().enumerate() {
                    f[c][i] += p.learning_rate * tree.predict_value(row)[0];
                }
                trees[c].push(tree);
            }
        }
        Boosting { learning_rate: p.learning_rate, init, trees }
    }

    pub fn raw_scores(&self, x: &[f64]) -> Vec<f64> {
        self.init
            .iter()
            .zip(&self.trees)
            .map(|(init, ts)| init + self.learning_rate * ts.iter().map(|t| t.predict_value(x)[0]).sum::<f64>())
            .collect()
    }

    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let s: Vec<f64> = self.raw_scores(x).into_iter().map(sigmoid).collect();
        let total: f64 = s.iter().sum();
        s.into_iter().map(|v| v / total).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn enc(y: &[usize], k: usize) -> Encoded {
        Encoded { y: y.to_vec(), n_classes: k }
    }

    #[test]
    fn one_dimensional_split_at_midpoint() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let t = Tree::fit_classifier(&TreeParams::default(), &x, &enc(&[0, 0, 1, 1], 2), 0);
        assert_eq!(t.root(), &Node::Split { feature: 0, threshold: 2.5, left: 1, right: 2 });
        assert_eq!(t.predict_value(&[2.4]), &[1.0, 0.0]);
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn identical_features_split_on_lowest_index() {
        let x = vec![vec![0.0, 5.0, 0.0], vec![1.0, 5.0, 1.0], vec![2.0, 5.0, 2.0]];
        let t = Tree::fit_classifier(&TreeParams::default(), &x, &enc(&[0, 1, 1], 2), 0);
        assert!(matches!(t.root(), Node::Split { feature: 0, threshold, .. } if *threshold == 0.5));
    }

    #[test]
    fn max_depth_and_min_leaf_are_respected() {
        let x: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64, (i * 7 % 5) as f64]).collect();
        let y: Vec<usize> = (0..32).map(|i| (i * 3 % 4) % 3).collect();
        let p = TreeParams { max_depth: Some(2), ..Default::default() };
        assert!(Tree::fit_classifier(&p, &x, &enc(&y, 3), 0).depth() <= 2);
        let p = TreeParams { min_samples_leaf: 5, ..Default::default() };
        let t = Tree::fit_classifier(&p, &x, &enc(&y, 3), 0);
        for row in &x {
            let v = t.predict_value(row);
            // every leaf holds at least 5 samples, so fractions are multiples of 1/n with n >= 5
            assert!(v.iter().all(|p| *p == 0.0 || *p >= 1.0 / 32.0));
        }
    }

    #[test]
    fn grown_tree_fits_distinct_training_points() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![((i * 37) % 41) as f64, ((i * 11) % 13) as f64]).collect();
        let y: Vec<usize> = (0..40).map(|i| (i * 5 + 1) % 4).collect();
        let t = Tree::fit_classifier(&TreeParams::default(), &x, &enc(&y, 4), 0);
        for (r, &c) in x.iter().zip(&y) {
            assert_eq!(argmax(t.predict_value(r)), c);
        }
    }

    #[test]
    fn single_unbootstrapped_tree_forest_equals_tree() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i % 7) as f64, 0.0, ((i * 3) % 5) as f64]).collect();
        let y: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let fp = ForestParams { n_trees: 1, bootstrap: false, max_features: MaxFeatures::ALL, ..Default::default() };
        let forest = Forest::fit(&fp, &x, &enc(&y, 3), 9);
        let tree = Tree::fit_classifier(&fp.tree(), &x, &enc(&y, 3), 1);
        assert_eq!(forest.trees[0], tree);
    }

    #[test]
    fn boosting_initial_scores_are_prior_log_odds() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let p = BoostParams { n_estimators: 1, ..Default::default() };
        let b = Boosting::fit(&p, &x, &enc(&[0, 1, 1, 1], 2));
        assert!((b.init[0] - (0.25f64 / 0.75).ln()).abs() < 1e-15);
        assert!((b.init[1] - 3f64.ln()).abs() < 1e-15);
        // the depth-3 first tree separates the classes; the first leaf holds the
        // residual 1 - 0.25 for class 0
        let s = b.raw_scores(&[0.0]);
        assert!((s[0] - (b.init[0] + 0.1 * 0.75)).abs() < 1e-12);
    }

    #[test]
    fn regression_tree_leaves_are_means() {
        let x = vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]];
        let y = [1.0, 3.0, -2.0, -4.0];
        let t = grow(
            &x,
            &Columns::new(&x),
            Target::Value(&y),
            &[1; 4],
            Limits { max_depth: Some(3), min_split: 2.0, min_leaf: 1.0, n_features: 1 },
            None,
        );
        assert_eq!(t.predict_value(&[0.0]), &[2.0]);
        assert_eq!(t.predict_value(&[1.0]), &[-3.0]);
    }

    /// Weighted Gini of the best root split by exhaustive search over sorted
    /// values, with the same tie rule.
    fn brute_root(x: &[Vec<f64>], y: &[usize], k: usize) -> Option<(usize, f64, f64)> {
        let gini = |idx: &[usize]| {
            let n = idx.len() as f64;
            let mut c = vec![0.0; k];
            idx.iter().for_each(|&i| c[y[i]] += 1.0);
            n - c.iter().map(|v| v * v).sum::<f64>() / n
        };
        let all: Vec<usize> = (0..x.len()).collect();
        let parent = gini(&all);
        let mut best: Option<(usize, f64, f64)> = None;
        for f in 0..x[0].len() {
            let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let thr = midpoint(w[0], w[1]);
                let (l, r): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| x[i][f] <= thr);
                let crit = gini(&l) + gini(&r);
                if best.is_none_or(|(_, _, b)| better(crit, b)) {
                    best = Some((f, thr, crit));
                }
            }
        }
        best.filter(|b| better(b.2, parent))
    }

    proptest! {
        #[test]
        fn root_split_matches_exhaustive_search(
            rows in prop::collection::vec(prop::collection::vec(prop::sample::select(vec![-2.0, -0.5, 0.0, 0.0, 1.0, 3.0]), 3), 4..30),
            labels in prop::collection::vec(0usize..3, 30),
        ) {
            let y: Vec<usize> = labels[..rows.len()].to_vec();
            let t = Tree::fit_classifier(&TreeParams { max_depth: Some(1), ..Default::default() }, &rows, &enc(&y, 3), 0);
            match (brute_root(&rows, &y, 3), t.root()) {
                (Some((f, thr, _)), Node::Split { feature, threshold, .. }) => {
                    prop_assert_eq!(f, *feature);
                    prop_assert_eq!(thr, *threshold);
                }
                (None, Node::Leaf { .. }) => {}
                (b, n) => prop_assert!(false, "{:?} vs {:?}", b, n),
            }
        }
    }
}
