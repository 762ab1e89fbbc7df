use serde::{Deserialize, Serialize};

use super::zodiac::{days_in_month, derive_zodiac, ZodiacSign};
use super::{CorpusError, PersonalityLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
    UnknownMultiple,
}

impl Gender {
    pub fn is_revealed(self) -> bool {
        matches!(self, Gender::Male | Gender::Female)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    #[serde(alias = "Self", alias = "SELF")]
    #[serde(rename = "self")]
    OnlySelf,
    #[serde(alias = "Public", alias = "PUBLIC")]
    Public,
    #[serde(alias = "MutualFollow", alias = "Mutual_follow", alias = "mutualfollow")]
    MutualFollow,
    #[serde(alias = "Followers")]
    Followers,
    #[serde(alias = "Following")]
    Following,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateOfBirth {
    pub day: u8,
    pub month: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<u16>,
    pub visibility: Visibility,
    pub year_visibility: Visibility,
}

impl DateOfBirth {
    pub fn zodiac(&self) -> Result<ZodiacSign, CorpusError> {
        derive_zodiac(self.day, self.month)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub personality: PersonalityLabel,
    #[serde(default)]
    pub bio: String,
    pub followers: u64,
    pub friends: u64,
    pub likes: u64,
    pub statuses: u64,
    pub media: u64,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dob: Option<DateOfBirth>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

impl UserRecord {
    /// Checks the invariants serde cannot express.
    pub fn validate(&self) -> Result<(), String> {
        if self.user_id.trim().is_empty() {
            return Err("user_id is empty".into());
        }
        if let Some(dob) = &self.dob {
            if !(1..=12).contains(&dob.month) || dob.day == 0 || dob.day > days_in_month(dob.month) {
                return Err(format!("invalid date of birth {}/{}", dob.day, dob.month));
            }
        }
        Ok(())
    }

    pub fn location_revealed(&self) -> bool {
        self.location.as_deref().is_some_and(|l| !l.trim().is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TweetKind {
    Tweet,
    Quote,
    Reply,
    Retweet,
}

impl TweetKind {
    /// Level zero holds authored content, level one interactions.
    pub fn level(self) -> u8 {
        match self {
            TweetKind::Tweet | TweetKind::Quote => 0,
            TweetKind::Reply | TweetKind::Retweet => 1,
        }
    }
}

/// A row of `tweets.jsonl`. The label is not stored; it is joined from the
/// owning user at load time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRow {
    pub user_id: String,
    pub text: String,
    pub kind: TweetKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TweetRecord {
    pub user_id: String,
    pub text: String,
    pub kind: TweetKind,
    pub label: PersonalityLabel,
}

impl TweetRecord {
    pub fn level(&self) -> u8 {
        self.kind.level()
    }

    pub fn to_row(&self) -> TweetRow {
        TweetRow { user_id: self.user_id.clone(), text: self.text.clone(), kind: self.kind }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_is_a_function_of_kind() {
        assert_eq!(TweetKind::Tweet.level(), 0);
        assert_eq!(TweetKind::Quote.level(), 0);
        assert_eq!(TweetKind::Reply.level(), 1);
        assert_eq!(TweetKind::Retweet.level(), 1);
    }

    #[test]
    fn visibility_accepts_observed_capitalization() {
        let dob: DateOfBirth =
            serde_json::from_str(r#"{"day":1,"month":2,"visibility":"Public","year_visibility":"Self"}"#).unwrap();
        assert_eq!(dob.visibility, Visibility::Public);
        assert_eq!(dob.year_visibility, Visibility::OnlySelf);
        assert_eq!(
            serde_json::to_string(&dob).unwrap(),
            r#"{"day":1,"month":2,"visibility":"public","year_visibility":"self"}"#
        );
    }

    #[test]
    fn validate_rejects_impossible_dates() {
        let mut u: UserRecord = serde_json::from_str(
            r#"{"user_id":"a","personality":"INTP","followers":1,"friends":2,"likes":3,
                "statuses":4,"media":5,"verified":false,
                "dob":{"day":29,"month":2,"visibility":"public","year_visibility":"self"}}"#,
        )
        .unwrap();
        assert!(u.validate().is_ok());
        u.dob.as_mut().unwrap().day = 30;
        assert!(u.validate().is_err());
    }

    #[test]
    fn negative_counts_do_not_parse() {
        let r = serde_json::from_str::<UserRecord>(
            r#"{"user_id":"a","personality":"INTP","followers":-1,"friends":2,"likes":3,
                "statuses":4,"media":5,"verified":false}"#,
        );
        assert!(r.is_err());
    }
}
