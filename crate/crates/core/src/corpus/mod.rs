//! Users, tweets and personality labels, plus corpus-level sampling.

mod io;
mod label;
mod records;
mod sampling;
pub mod synthetic;
mod zodiac;

use thiserror::Error;

pub use io::{
    load_tagged, load_tweets, load_users, scan_tagged, scan_tweets, scan_users, write_jsonl, write_tweets, write_users,
    Issue, Scan, TaggedText,
};
pub use label::{parse_personality, Axis, AxisSide, PersonalityLabel, RoleGroup};
pub use records::{DateOfBirth, Gender, TweetKind, TweetRecord, TweetRow, UserRecord, Visibility};
pub use sampling::{balance_by_type, split_train_test, test_count, BalancedCorpus, Split};
pub use synthetic::{generate_synthetic, SyntheticSpec, TypeSpec};
pub use zodiac::{derive_zodiac, ZodiacSign};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CorpusError {
    #[error("invalid personality code {0:?}")]
    InvalidCode(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate user_id {0:?}")]
    DuplicateUser(String),
    #[error("tweet refers to unknown user_id {0:?}")]
    UnknownUser(String),
    #[error("no tweets for personality type {0}")]
    MissingType(PersonalityLabel),
    #[error("class {0} would leave an empty training split")]
    DegenerateClass(String),
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("invalid date {day}/{month}")]
    InvalidDate { day: u8, month: u8 },
    #[error("i/o error: {0}")]
    Io(String),
}
