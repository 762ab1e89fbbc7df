//! Synthetic corpora with controllable per-type vocabulary skew.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::records::{DateOfBirth, Gender, TweetKind, TweetRecord, UserRecord, Visibility};
use super::{CorpusError, PersonalityLabel};
use crate::util::rng;

const ARABIC_LETTERS: [char; 28] = [
    'ا', 'ب', 'ت', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع', 'غ', 'ف', 'ق', 'ك', 'ل',
    'م', 'ن', 'ه', 'و', 'ي',
];

const EMOJIS: [&str; 6] = ["😀", "😂", "❤️", "👍", "🔥", "🌙"];

/// A 4-letter Arabic pseudo-word; distinct `n` give distinct words.
pub fn pseudo_word(n: usize) -> String {
    let mut n = n;
    let mut out = [' '; 4];
    for slot in out.iter_mut().rev() {
        *slot = ARABIC_LETTERS[n % 28];
        n /= 28;
    }
    out.iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeSpec {
    pub label: PersonalityLabel,
    pub users: usize,
    pub tweets: usize,
    /// Weighted token distribution for this type.
    pub vocabulary: Vec<(String, f64)>,
    #[serde(default = "default_followers")]
    pub followers_mean: u64,
    #[serde(default)]
    pub hashtag_rate: f64,
    #[serde(default)]
    pub emoji_rate: f64,
    #[serde(default)]
    pub mention_rate: f64,
    /// Probability that a user reveals gender, date of birth and location.
    #[serde(default = "default_reveal")]
    pub reveal_rate: f64,
}

fn default_followers() -> u64 {
    100
}

fn default_reveal() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub types: Vec<TypeSpec>,
    /// Tokens shared by every type, drawn with probability `shared_rate`.
    #[serde(default)]
    pub shared_vocabulary: Vec<String>,
    #[serde(default)]
    pub shared_rate: f64,
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Fraction of tweets emitted as replies or retweets.
    #[serde(default)]
    pub level_one_rate: f64,
}

impl SyntheticSpec {
    /// All 16 types with pairwise-disjoint vocabularies of `vocab_per_type`
    /// uniformly weighted pseudo-words.
    pub fn disjoint(tweets_per_type: usize, users_per_type: usize, vocab_per_type: usize) -> Self {
        let types = PersonalityLabel::all()
            .map(|label| TypeSpec {
                label,
                users: users_per_type,
                tweets: tweets_per_type,
                vocabulary: (0..vocab_per_type)
                    .map(|w| (pseudo_word(label.index() * vocab_per_type + w), 1.0))
                    .collect(),
                followers_mean: default_followers(),
                hashtag_rate: 0.2,
                emoji_rate: 0.3,
                mention_rate: 0.2,
                reveal_rate: default_reveal(),
            })
            .collect();
        SyntheticSpec {
            types,
            shared_vocabulary: Vec::new(),
            shared_rate: 0.0,
            min_tokens: 4,
            max_tokens: 10,
            level_one_rate: 0.0,
        }
    }

    fn validate(&self) -> Result<(), CorpusError> {
        let bad = |m: &str| Err(CorpusError::InvalidSpec(m.to_string()));
        if self.types.len() < 2 {
            return bad("at least two types are required");
        }
        let mut labels: Vec<_> = self.types.iter().map(|t| t.label).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.types.len() {
            return bad("duplicate type");
        }
        if self.min_tokens == 0 || self.min_tokens > self.max_tokens {
            return bad("token range must satisfy 1 <= min_tokens <= max_tokens");
        }
        for p in [self.shared_rate, self.level_one_rate] {
            if !(0.0..=1.0).contains(&p) {
                return bad("rates must lie in [0, 1]");
            }
        }
        if self.shared_rate > 0.0 && self.shared_vocabulary.is_empty() {
            return bad("shared_rate > 0 needs a shared vocabulary");
        }
        for t in &self.types {
            if t.tweets > 0 && t.users == 0 {
                return bad(&format!("{}: tweets without users", t.label));
            }
            if t.vocabulary.is_empty() || t.vocabulary.iter().any(|(w, p)| w.trim().is_empty() || !(*p > 0.0)) {
                return bad(&format!("{}: vocabulary needs non-empty tokens with positive weights", t.label));
            }
            for p in [t.hashtag_rate, t.emoji_rate, t.mention_rate, t.reveal_rate] {
                if !(0.0..=1.0).contains(&p) {
                    return bad("rates must lie in [0, 1]");
                }
            }
        }
        Ok(())
    }
}

/// Generates users and tweets. Deterministic under `seed`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<(Vec<UserRecord>, Vec<TweetRecord>), CorpusError> {
    spec.validate()?;
    let mut rng = rng(seed);
    let mut users = Vec::new();
    let mut tweets = Vec::new();
    for t in &spec.types {
        let weights = WeightedIndex::new(t.vocabulary.iter().map(|(_, w)| *w))
            .map_err(|e| CorpusError::InvalidSpec(e.to_string()))?;
        let first_user = users.len();
        for u in 0..t.users {
            users.push(synthetic_user(t, u, &weights, &mut rng));
        }
        for i in 0..t.tweets {
            let owner = &users[first_user + i % t.users];
            let n = rng.random_range(spec.min_tokens..=spec.max_tokens);
            let mut words: Vec<String> = (0..n)
                .map(|_| {
                    if spec.shared_rate > 0.0 && rng.random_bool(spec.shared_rate) {
                        let k = rng.random_range(0..spec.shared_vocabulary.len());
                        spec.shared_vocabulary[k].clone()
                    } else {
                        t.vocabulary[weights.sample(&mut rng)].0.clone()
                    }
                })
                .collect();
            if rng.random_bool(t.hashtag_rate) {
                words.push(format!("#{}", t.vocabulary[weights.sample(&mut rng)].0));
            }
            if rng.random_bool(t.mention_rate) {
                words.push(format!("@user{}", rng.random_range(0..50)));
            }
            if rng.random_bool(t.emoji_rate) {
                words.push(EMOJIS[rng.random_range(0..EMOJIS.len())].to_string());
            }
            let kind = if spec.level_one_rate > 0.0 && rng.random_bool(spec.level_one_rate) {
                if rng.random_bool(0.5) {
                    TweetKind::Reply
                } else {
                    TweetKind::Retweet
                }
            } else if rng.random_bool(0.1) {
                TweetKind::Quote
            } else {
                TweetKind::Tweet
            };
            tweets.push(TweetRecord { user_id: owner.user_id.clone(), text: words.join(" "), kind, label: t.label });
        }
    }
    Ok((users, tweets))
}

fn synthetic_user(t: &TypeSpec, n: usize, weights: &WeightedIndex<f64>, rng: &mut impl Rng) -> UserRecord {
    let scale = |mean: u64, rng: &mut dyn rand::RngCore| -> u64 {
        // uniform in [mean/2, 3*mean/2]
        let lo = mean / 2;
        lo + rng.next_u64() % (mean + 1)
    };
    let reveal = |rng: &mut dyn rand::RngCore| rng.next_u64() % 1_000_000 < (t.reveal_rate * 1e6) as u64;
    let bio_len = rng.random_range(0..4usize);
    let bio: Vec<String> = (0..bio_len).map(|_| t.vocabulary[weights.sample(rng)].0.clone()).collect();
    let gender = if reveal(rng) {
        Some(if rng.random_bool(0.5) { Gender::Male } else { Gender::Female })
    } else if rng.random_bool(0.3) {
        Some(Gender::UnknownMultiple)
    } else {
        None
    };
    let dob = reveal(rng).then(|| {
        let month = rng.random_range(1..=12u8);
        DateOfBirth {
            day: rng.random_range(1..=28u8),
            month,
            year: rng.random_bool(0.5).then(|| rng.random_range(1970..=2005u16)),
            visibility: Visibility::Public,
            year_visibility: Visibility::OnlySelf,
        }
    });
    let location = reveal(rng).then(|| "الرياض".to_string());
    UserRecord {
        user_id: format!("{}-{n:04}", t.label),
        personality: t.label,
        bio: bio.join(" "),
        followers: scale(t.followers_mean, rng),
        friends: scale(150, rng),
        likes: scale(1000, rng),
        statuses: scale(2000, rng),
        media: scale(50, rng),
        verified: rng.random_bool(0.05),
        gender,
        dob,
        location,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::io::{write_tweets, write_users};
    use std::collections::HashSet;

    #[test]
    fn pseudo_words_are_distinct() {
        let words: HashSet<_> = (0..5000).map(pseudo_word).collect();
        assert_eq!(words.len(), 5000);
        assert!(words.iter().all(|w| w.chars().count() == 4));
    }

    #[test]
    fn sixteen_by_fifty() {
        let spec = SyntheticSpec::disjoint(50, 1, 20);
        let (users, tweets) = generate_synthetic(&spec, 42).unwrap();
        assert_eq!(tweets.len(), 800);
        assert!(users.len() >= 16);
        for u in &users {
            assert!(u.validate().is_ok());
        }
    }

    #[test]
    fn byte_identical_output() {
        let spec = SyntheticSpec::disjoint(10, 2, 15);
        let dir = tempfile::tempdir().unwrap();
        let mut files = Vec::new();
        for run in 0..2 {
            let (users, tweets) = generate_synthetic(&spec, 9).unwrap();
            let u = dir.path().join(format!("u{run}.jsonl"));
            let t = dir.path().join(format!("t{run}.jsonl"));
            write_users(&u, &users).unwrap();
            write_tweets(&t, &tweets).unwrap();
            files.push((std::fs::read(u).unwrap(), std::fs::read(t).unwrap()));
        }
        assert_eq!(files[0], files[1]);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = SyntheticSpec::disjoint(10, 1, 5);
        spec.types.truncate(1);
        assert!(matches!(generate_synthetic(&spec, 0), Err(CorpusError::InvalidSpec(_))));
        let mut spec = SyntheticSpec::disjoint(10, 1, 5);
        spec.types[3].users = 0;
        assert!(matches!(generate_synthetic(&spec, 0), Err(CorpusError::InvalidSpec(_))));
        let mut spec = SyntheticSpec::disjoint(10, 1, 5);
        spec.types[0].vocabulary.clear();
        assert!(matches!(generate_synthetic(&spec, 0), Err(CorpusError::InvalidSpec(_))));
    }
}
