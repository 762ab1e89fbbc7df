use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::records::{TweetRecord, TweetRow, UserRecord};
use super::{CorpusError, PersonalityLabel};
use crate::sentiment::SentimentLabel;

/// A problem found while scanning a corpus file. `line` is 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Issue {
    pub line: usize,
    pub error: CorpusError,
}

/// Everything a scan found: the records that parsed, plus every issue.
#[derive(Debug, Default)]
pub struct Scan<T> {
    pub records: Vec<T>,
    pub issues: Vec<Issue>,
}

impl<T> Scan<T> {
    fn into_result(mut self) -> Result<Vec<T>, CorpusError> {
        if self.issues.is_empty() {
            Ok(self.records)
        } else {
            Err(self.issues.swap_remove(0).error)
        }
    }
}

fn lines(path: &Path) -> Result<impl Iterator<Item = (usize, std::io::Result<String>)>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufReader::new(file).lines().enumerate().map(|(i, l)| (i + 1, l)))
}

fn parse_line<T: for<'de> Deserialize<'de>>(line: usize, text: &str) -> Result<T, CorpusError> {
    serde_json::from_str(text).map_err(|e| CorpusError::Parse { line, message: e.to_string() })
}

/// Scans `users.jsonl`, collecting every issue instead of stopping at the first.
pub fn scan_users(path: &Path) -> Result<Scan<UserRecord>, CorpusError> {
    let mut scan = Scan { records: Vec::new(), issues: Vec::new() };
    let mut seen = HashSet::new();
    for (line, text) in lines(path)? {
        let text = text.map_err(|e| CorpusError::Io(e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        let user: UserRecord = match parse_line(line, &text) {
            Ok(u) => u,
            Err(error) => {
                scan.issues.push(Issue { line, error });
                continue;
            }
        };
        if let Err(message) = user.validate() {
            scan.issues.push(Issue { line, error: CorpusError::Parse { line, message } });
            continue;
        }
        if !seen.insert(user.user_id.clone()) {
            scan.issues.push(Issue { line, error: CorpusError::DuplicateUser(user.user_id) });
            continue;
        }
        scan.records.push(user);
    }
    Ok(scan)
}

pub fn load_users(path: &Path) -> Result<Vec<UserRecord>, CorpusError> {
    scan_users(path)?.into_result()
}

/// Scans `tweets.jsonl`, joining each tweet with its owner's label.
pub fn scan_tweets(path: &Path, users: &[UserRecord]) -> Result<Scan<TweetRecord>, CorpusError> {
    let labels: HashMap<&str, PersonalityLabel> = users.iter().map(|u| (u.user_id.as_str(), u.personality)).collect();
    let mut scan = Scan { records: Vec::new(), issues: Vec::new() };
    for (line, text) in lines(path)? {
        let text = text.map_err(|e| CorpusError::Io(e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        let row: TweetRow = match parse_line(line, &text) {
            Ok(r) => r,
            Err(error) => {
                scan.issues.push(Issue { line, error });
                continue;
            }
        };
        if row.text.trim().is_empty() {
            let error = CorpusError::Parse { line, message: "tweet text is empty".into() };
            scan.issues.push(Issue { line, error });
            continue;
        }
        let Some(&label) = labels.get(row.user_id.as_str()) else {
            scan.issues.push(Issue { line, error: CorpusError::UnknownUser(row.user_id) });
            continue;
        };
        scan.records.push(TweetRecord { user_id: row.user_id, text: row.text, kind: row.kind, label });
    }
    Ok(scan)
}

pub fn load_tweets(path: &Path, users: &[UserRecord]) -> Result<Vec<TweetRecord>, CorpusError> {
    scan_tweets(path, users)?.into_result()
}

/// A row of a sentiment-tagged corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedText {
    pub text: String,
    pub label: SentimentLabel,
}

pub fn scan_tagged(path: &Path) -> Result<Scan<TaggedText>, CorpusError> {
    let mut scan = Scan { records: Vec::new(), issues: Vec::new() };
    for (line, text) in lines(path)? {
        let text = text.map_err(|e| CorpusError::Io(e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        match parse_line(line, &text) {
            Ok(r) => scan.records.push(r),
            Err(error) => scan.issues.push(Issue { line, error }),
        }
    }
    Ok(scan)
}

pub fn load_tagged(path: &Path) -> Result<Vec<TaggedText>, CorpusError> {
    scan_tagged(path)?.into_result()
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CorpusError> {
    let io = |e: std::io::Error| CorpusError::Io(format!("{}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    for row in rows {
        let line = serde_json::to_string(&row).map_err(|e| CorpusError::Io(e.to_string()))?;
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn write_users(path: &Path, users: &[UserRecord]) -> Result<(), CorpusError> {
    write_jsonl(path, users)
}

pub fn write_tweets(path: &Path, tweets: &[TweetRecord]) -> Result<(), CorpusError> {
    write_jsonl(path, tweets.iter().map(TweetRecord::to_row))
}
