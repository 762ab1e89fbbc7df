//! Personality (MBTI) prediction and profile analytics for Arabic social-media
//! corpora.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`]: users, tweets and the 16 personality labels; JSONL loading,
//!   class balancing, stratified splitting and a synthetic corpus generator.
//! * [`textproc`]: Arabic-aware normalization, tweet tokenization and
//!   surface-feature counts.
//! * [`vectorize`]: vocabularies, bag-of-words and TF-IDF vectors.
//! * [`embed`]: skip-gram word2vec with negative sampling.
//! * [`models`]: from-scratch classifiers, evaluation, persistence and the
//!   benchmark grid.
//! * [`sentiment`]: a 3-class sentiment classifier and per-type sentiment shares.
//! * [`analytics`]: per-type and per-axis descriptive statistics.
//! * [`cli`]: the `mbti` command-line front end.
//!
//! A narrative guide lives in `book/`; its code listings are compiled and run
//! as doc-tests of this crate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod cli;
pub mod corpus;
pub mod embed;
pub mod models;
pub mod sentiment;
pub mod textproc;
pub mod vectorize;

mod util;

pub use corpus::{PersonalityLabel, TweetRecord, UserRecord};
pub use textproc::{normalize, surface_features, tokenize};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/text.md")]
    mod text {}
    #[doc = include_str!("../../../book/src/tfidf.md")]
    mod tfidf {}
    #[doc = include_str!("../../../book/src/word2vec.md")]
    mod word2vec {}
    #[doc = include_str!("../../../book/src/classifiers.md")]
    mod classifiers {}
    #[doc = include_str!("../../../book/src/neural.md")]
    mod neural {}
    #[doc = include_str!("../../../book/src/sentiment.md")]
    mod sentiment {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
}
