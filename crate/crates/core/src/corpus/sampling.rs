use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::{CorpusError, PersonalityLabel, TweetRecord};
use crate::util::rng;

/// Equal-count subsample of a corpus: every type holds exactly `quota` tweets.
#[derive(Clone, Debug, PartialEq)]
pub struct BalancedCorpus {
    pub per_type: BTreeMap<PersonalityLabel, Vec<TweetRecord>>,
    pub quota: usize,
}

impl BalancedCorpus {
    /// All records, grouped by type in label order.
    pub fn records(&self) -> impl Iterator<Item = &TweetRecord> {
        self.per_type.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.quota * self.per_type.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_records(self) -> Vec<TweetRecord> {
        self.per_type.into_values().flatten().collect()
    }
}

/// Samples every type down to the smallest type's count, without replacement.
///
/// Sampled records keep their input order within each type.
pub fn balance_by_type(tweets: &[TweetRecord], seed: u64) -> Result<BalancedCorpus, CorpusError> {
    let mut groups: BTreeMap<PersonalityLabel, Vec<usize>> = BTreeMap::new();
    for (i, t) in tweets.iter().enumerate() {
        groups.entry(t.label).or_default().push(i);
    }
    if let Some(missing) = PersonalityLabel::all().find(|l| !groups.contains_key(l)) {
        return Err(CorpusError::MissingType(missing));
    }
    let quota = groups.values().map(Vec::len).min().unwrap_or(0);
    let mut rng = rng(seed);
    let mut per_type = BTreeMap::new();
    for (label, mut idx) in groups {
        idx.shuffle(&mut rng);
        idx.truncate(quota);
        idx.sort_unstable();
        per_type.insert(label, idx.into_iter().map(|i| tweets[i].clone()).collect());
    }
    Ok(BalancedCorpus { per_type, quota })
}

/// Train/test index partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per-class test size: `class_size × fraction`, rounded half up.
pub fn test_count(class_size: usize, test_fraction: f64) -> usize {
    // the epsilon keeps exact halves such as 1.5 from landing just below .5
    ((class_size as f64 * test_fraction) + 0.5 + 1e-9).floor() as usize
}

/// Stratified split of item indices by label.
///
/// Both returned index lists are sorted ascending.
pub fn split_train_test<L: Ord + Clone + std::fmt::Debug>(
    labels: &[L],
    test_fraction: f64,
    seed: u64,
) -> Result<Split, CorpusError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(test_fraction));
    }
    let mut groups: BTreeMap<&L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let mut rng = rng(seed);
    let mut train = Vec::with_capacity(labels.len());
    let mut test = Vec::new();
    for (label, mut idx) in groups {
        let n_test = test_count(idx.len(), test_fraction);
        if n_test >= idx.len() {
            return Err(CorpusError::DegenerateClass(format!("{label:?}")));
        }
        idx.shuffle(&mut rng);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::records::TweetKind;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn corpus(counts: &[(PersonalityLabel, usize)]) -> Vec<TweetRecord> {
        let mut out = Vec::new();
        for &(label, n) in counts {
            for i in 0..n {
                out.push(TweetRecord {
                    user_id: format!("{label}"),
                    text: format!("{label} {i}"),
                    kind: TweetKind::Tweet,
                    label,
                });
            }
        }
        out
    }

    fn uniform(n: usize) -> Vec<(PersonalityLabel, usize)> {
        PersonalityLabel::all().map(|l| (l, n)).collect()
    }

    #[test]
    fn already_balanced_keeps_everything() {
        let tweets = corpus(&uniform(10));
        let b = balance_by_type(&tweets, 1).unwrap();
        assert_eq!(b.quota, 10);
        assert_eq!(b.len(), 160);
    }

    #[test]
    fn quota_is_the_minimum_count() {
        let entj: PersonalityLabel = "ENTJ".parse().unwrap();
        let counts: Vec<_> = PersonalityLabel::all().map(|l| (l, if l == entj { 5 } else { 100 })).collect();
        let tweets = corpus(&counts);
        let b = balance_by_type(&tweets, 7).unwrap();
        // brute force: smallest group size times the number of groups
        let mut sizes: HashMap<PersonalityLabel, usize> = HashMap::new();
        for t in &tweets {
            *sizes.entry(t.label).or_default() += 1;
        }
        let min = *sizes.values().min().unwrap();
        assert_eq!(b.quota, min);
        assert_eq!(b.records().count(), 80);
    }

    #[test]
    fn balancing_is_deterministic() {
        let tweets = corpus(&uniform(30));
        let mut tweets = tweets;
        tweets.truncate(30 * 16 - 7);
        assert_eq!(balance_by_type(&tweets, 42).unwrap(), balance_by_type(&tweets, 42).unwrap());
        assert_ne!(balance_by_type(&tweets, 42).unwrap(), balance_by_type(&tweets, 43).unwrap());
    }

    #[test]
    fn missing_type_is_an_error() {
        let tweets = corpus(&uniform(3)[1..]);
        assert!(matches!(balance_by_type(&tweets, 0), Err(CorpusError::MissingType(_))));
    }

    #[test]
    fn eighty_twenty_per_class() {
        let labels: Vec<usize> = (0..16).flat_map(|c| std::iter::repeat_n(c, 100)).collect();
        let s = split_train_test(&labels, 0.2, 42).unwrap();
        for c in 0..16 {
            assert_eq!(s.test.iter().filter(|&&i| labels[i] == c).count(), 20);
            assert_eq!(s.train.iter().filter(|&&i| labels[i] == c).count(), 80);
        }
        assert_eq!(s, split_train_test(&labels, 0.2, 42).unwrap());
    }

    #[test]
    fn half_rounds_up() {
        let s = split_train_test(&["a", "a", "a"], 0.5, 0).unwrap();
        assert_eq!(s.test.len(), 2);
        assert_eq!(s.train.len(), 1);
    }

    #[test]
    fn degenerate_class_and_bad_fraction() {
        assert!(matches!(split_train_test(&["a"], 0.5, 0), Err(CorpusError::DegenerateClass(_))));
        assert!(matches!(split_train_test(&["a", "a"], 0.0, 0), Err(CorpusError::InvalidFraction(_))));
        assert!(matches!(split_train_test(&["a", "a"], 1.0, 0), Err(CorpusError::InvalidFraction(_))));
    }

    proptest! {
        #[test]
        fn split_partitions_each_class(
            labels in proptest::collection::vec(0u8..5, 1..120),
            frac in 0.05f64..0.45,
            seed in any::<u64>(),
        ) {
            // guarantee every class has at least 3 members so no class degenerates
            let mut labels = labels;
            for c in 0..5u8 { labels.extend([c, c, c]); }
            let s = split_train_test(&labels, frac, seed).unwrap();
            let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            for c in 0..5u8 {
                let n = labels.iter().filter(|&&l| l == c).count();
                let t = s.test.iter().filter(|&&i| labels[i] == c).count();
                prop_assert_eq!(t, test_count(n, frac));
            }
        }

        #[test]
        fn balanced_records_come_from_the_input(
            extra in proptest::collection::vec(0usize..16, 0..60),
            seed in any::<u64>(),
        ) {
            let mut counts: Vec<(PersonalityLabel, usize)> = uniform(2);
            for e in extra { counts[e].1 += 1; }
            let tweets = corpus(&counts);
            let b = balance_by_type(&tweets, seed).unwrap();
            for v in b.per_type.values() {
                prop_assert_eq!(v.len(), b.quota);
                for r in v { prop_assert!(tweets.contains(r)); }
                let mut texts: Vec<_> = v.iter().map(|r| &r.text).collect();
                texts.dedup();
                prop_assert_eq!(texts.len(), b.quota);
            }
        }
    }
}
