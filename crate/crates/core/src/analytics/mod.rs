//! Per-type and per-axis descriptive statistics over users and tweets.
//!
//! Every [`StatReport`] lists all 16 types and all 8 axis sides. Type means
//! are plain means over that type's users (or tweets); an axis side pools
//! the records of its 8 member types, which is the count-weighted mean of
//! the type means. The unweighted mean of the type means is reported next to
//! it. Cells without records carry `mean: None`.

pub mod svg;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Axis, AxisSide, PersonalityLabel, TweetRecord, UserRecord, ZodiacSign};
use crate::textproc::{bio_features, normalize, surface_features, tokenize, BioField, SurfaceField, TokenKind};
use svg::{bar_chart, Series};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("no tweets at level {0}")]
    EmptyLevel(u8),
    #[error("personality type {0} has no tweets")]
    MissingType(PersonalityLabel),
    #[error("axis side {0:?} has no records")]
    AbsentSide(AxisSide),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeCell {
    pub n: u64,
    pub mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisCell {
    pub n: u64,
    /// Pooled over all records of the member types.
    pub mean: Option<f64>,
    /// Unweighted mean of the populated member types' means.
    pub mean_of_type_means: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub metric: String,
    /// What a cell value is, e.g. `mean per user` or `rate`.
    pub statistic: String,
    pub per_type: BTreeMap<PersonalityLabel, TypeCell>,
    pub per_axis: BTreeMap<AxisSide, AxisCell>,
}

impl StatReport {
    /// Aggregates `(type, value)` observations. Values are summed in sorted
    /// order, so the result does not depend on input order.
    pub fn from_observations(
        metric: &str,
        statistic: &str,
        observations: impl IntoIterator<Item = (PersonalityLabel, f64)>,
    ) -> Self {
        let mut groups: BTreeMap<PersonalityLabel, Vec<f64>> =
            PersonalityLabel::all().map(|l| (l, Vec::new())).collect();
        for (l, v) in observations {
            groups.get_mut(&l).expect("all labels present").push(v);
        }
        let sums: BTreeMap<PersonalityLabel, (u64, f64)> = groups
            .into_iter()
            .map(|(l, mut v)| {
                v.sort_by(f64::total_cmp);
                (l, (v.len() as u64, v.iter().sum()))
            })
            .collect();
        let per_type = sums
            .iter()
            .map(|(l, &(n, s))| (*l, TypeCell { n, mean: (n > 0).then(|| s / n as f64) }))
            .collect::<BTreeMap<_, _>>();
        let per_axis = AxisSide::ALL
            .into_iter()
            .map(|side| {
                let (mut n, mut s, mut means) = (0u64, 0.0, Vec::new());
                for l in side.members() {
                    let (tn, ts) = sums[&l];
                    n += tn;
                    s += ts;
                    if tn > 0 {
                        means.push(ts / tn as f64);
                    }
                }
                let mean_of_type_means = (!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64);
                (side, AxisCell { n, mean: (n > 0).then(|| s / n as f64), mean_of_type_means })
            })
            .collect();
        StatReport { metric: metric.to_string(), statistic: statistic.to_string(), per_type, per_axis }
    }

    pub fn type_mean(&self, label: PersonalityLabel) -> Option<f64> {
        self.per_type[&label].mean
    }

    pub fn axis_mean(&self, side: AxisSide) -> Option<f64> {
        self.per_axis[&side].mean
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_svg(&self) -> String {
        let mut cats: Vec<String> = self.per_type.keys().map(|l| l.code()).collect();
        let mut values: Vec<Option<f64>> = self.per_type.values().map(|c| c.mean).collect();
        cats.extend(self.per_axis.keys().map(|s| s.letter().to_string()));
        values.extend(self.per_axis.values().map(|c| c.mean));
        bar_chart(
            &format!("{} ({})", self.metric, self.statistic),
            &cats,
            &[Series { name: self.metric.clone(), values }],
        )
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// One CSV for any number of reports:
/// `metric,statistic,scope,cell,n,mean,mean_of_type_means,present`.
pub fn reports_to_csv(reports: &[StatReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "statistic", "scope", "cell", "n", "mean", "mean_of_type_means", "present"])
        .expect("in-memory csv");
    for r in reports {
        for (l, c) in &r.per_type {
            let rec = [
                &r.metric,
                &r.statistic,
                "type",
                &l.code(),
                &c.n.to_string(),
                &fmt_opt(c.mean),
                "",
                &c.mean.is_some().to_string(),
            ];
            w.write_record(rec).expect("in-memory csv");
        }
        for (s, c) in &r.per_axis {
            let rec = [
                &r.metric,
                &r.statistic,
                "axis",
                &s.letter().to_string(),
                &c.n.to_string(),
                &fmt_opt(c.mean),
                &fmt_opt(c.mean_of_type_means),
                &c.mean.is_some().to_string(),
            ];
            w.write_record(rec).expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMetric {
    Followers,
    Friends,
    Likes,
    Statuses,
    Media,
    VerifiedRate,
}

impl ProfileMetric {
    pub const ALL: [ProfileMetric; 6] = [
        ProfileMetric::Followers,
        ProfileMetric::Friends,
        ProfileMetric::Likes,
        ProfileMetric::Statuses,
        ProfileMetric::Media,
        ProfileMetric::VerifiedRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileMetric::Followers => "followers",
            ProfileMetric::Friends => "friends",
            ProfileMetric::Likes => "likes",
            ProfileMetric::Statuses => "statuses",
            ProfileMetric::Media => "media",
            ProfileMetric::VerifiedRate => "verified_rate",
        }
    }

    pub fn value(self, u: &UserRecord) -> f64 {
        match self {
            ProfileMetric::Followers => u.followers as f64,
            ProfileMetric::Friends => u.friends as f64,
            ProfileMetric::Likes => u.likes as f64,
            ProfileMetric::Statuses => u.statuses as f64,
            ProfileMetric::Media => u.media as f64,
            ProfileMetric::VerifiedRate => u.verified as u8 as f64,
        }
    }
}

pub fn profile_stats_by_type(users: &[UserRecord], metric: ProfileMetric) -> StatReport {
    let statistic = if metric == ProfileMetric::VerifiedRate { "rate" } else { "mean per user" };
    StatReport::from_observations(metric.name(), statistic, users.iter().map(|u| (u.personality, metric.value(u))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevealField {
    Gender,
    Dob,
    Location,
}

impl RevealField {
    pub const ALL: [RevealField; 3] = [RevealField::Gender, RevealField::Dob, RevealField::Location];

    pub fn name(self) -> &'static str {
        match self {
            RevealField::Gender => "gender_revealed",
            RevealField::Dob => "dob_revealed",
            RevealField::Location => "location_revealed",
        }
    }

    pub fn revealed(self, u: &UserRecord) -> bool {
        match self {
            RevealField::Gender => u.gender.is_some_and(|g| g.is_revealed()),
            RevealField::Dob => u.dob.is_some(),
            RevealField::Location => u.location_revealed(),
        }
    }
}

pub fn reveal_rates(users: &[UserRecord], field: RevealField) -> StatReport {
    StatReport::from_observations(
        field.name(),
        "rate",
        users.iter().map(|u| (u.personality, field.revealed(u) as u8 as f64)),
    )
}

/// Mean of a surface feature over the tweets of one interaction level
/// (0: own tweets, 1: quotes and replies).
pub fn level_feature_aggregate(
    tweets: &[TweetRecord],
    level: u8,
    feature: SurfaceField,
) -> Result<StatReport, AnalyticsError> {
    let obs: Vec<(PersonalityLabel, f64)> = tweets
        .iter()
        .filter(|t| t.level() == level)
        .map(|t| (t.label, surface_features(&t.text).get(feature)))
        .collect();
    if obs.is_empty() {
        return Err(AnalyticsError::EmptyLevel(level));
    }
    Ok(StatReport::from_observations(&format!("level{level}_{}", feature.name()), "mean per tweet", obs))
}

/// Mean of a bio feature per user; an empty bio counts as zeros.
pub fn bio_feature_aggregate(users: &[UserRecord], feature: BioField) -> StatReport {
    StatReport::from_observations(
        feature.name(),
        "mean per user",
        users.iter().map(|u| (u.personality, bio_features(&u.bio).get(feature) as f64)),
    )
}

/// Mean age in whole years at `reference_year`, over users whose birth
/// year is known.
pub fn age_stats(users: &[UserRecord], reference_year: u16) -> StatReport {
    StatReport::from_observations(
        "age",
        "mean per user with birth year",
        users.iter().filter_map(|u| {
            let year = u.dob.as_ref()?.year?;
            Some((u.personality, reference_year as f64 - year as f64))
        }),
    )
}

/// Zodiac sign counts per type over users with a date of birth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZodiacReport {
    pub per_type: BTreeMap<PersonalityLabel, BTreeMap<ZodiacSign, u64>>,
}

pub fn zodiac_distribution(users: &[UserRecord]) -> ZodiacReport {
    let mut per_type: BTreeMap<PersonalityLabel, BTreeMap<ZodiacSign, u64>> =
        PersonalityLabel::all().map(|l| (l, ZodiacSign::ALL.into_iter().map(|z| (z, 0)).collect())).collect();
    for u in users {
        if let Some(Ok(sign)) = u.dob.as_ref().map(|d| d.zodiac()) {
            *per_type.get_mut(&u.personality).expect("all labels").get_mut(&sign).expect("all signs") += 1;
        }
    }
    ZodiacReport { per_type }
}

impl ZodiacReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["type".to_string()];
        header.extend(ZodiacSign::ALL.iter().map(|z| format!("{z:?}").to_lowercase()));
        w.write_record(&header).expect("in-memory csv");
        for (l, counts) in &self.per_type {
            let mut rec = vec![l.code()];
            rec.extend(counts.values().map(|c| c.to_string()));
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Tokens excluded from word clouds, stored normalized.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StopList(BTreeSet<String>);

/// Common Arabic function words.
const DEFAULT_STOP_WORDS: &str = "في من على الى إلى عن مع ان أن إن لا ما هذا هذه ذلك التي الذي كان كل او أو و يا لم لن قد هو هي انا أنا انت أنت نحن هم بس بعد قبل عند حتى اذا إذا كما ثم لكن الله";

impl StopList {
    pub fn empty() -> Self {
        StopList(BTreeSet::new())
    }

    pub fn default_arabic() -> Self {
        Self::from_words(DEFAULT_STOP_WORDS.split_whitespace())
    }

    pub fn from_words<'a>(words: impl IntoIterator<Item = &'a str>) -> Self {
        StopList(words.into_iter().map(|w| normalize(w).to_lowercase()).filter(|w| !w.is_empty()).collect())
    }

    /// One word per line; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Self {
        Self::from_words(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Word tokens of a tweet as counted by [`word_cloud`]: Arabic and Latin
/// words after normalization, Latin lowercased.
pub fn cloud_tokens(text: &str) -> Vec<String> {
    tokenize(&normalize(text))
        .into_iter()
        .filter_map(|t| match t.kind {
            TokenKind::Word => Some(t.text),
            TokenKind::LatinWord => Some(t.text.to_lowercase()),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordCloud {
    pub personality: PersonalityLabel,
    /// Descending frequency; equal frequencies in lexicographic order.
    pub entries: Vec<(String, u64)>,
}

pub fn word_cloud(
    tweets: &[TweetRecord],
    personality: PersonalityLabel,
    k: usize,
    stop_list: &StopList,
) -> Result<WordCloud, AnalyticsError> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut any = false;
    for t in tweets.iter().filter(|t| t.label == personality) {
        any = true;
        for tok in cloud_tokens(&t.text) {
            if !stop_list.contains(&tok) {
                *counts.entry(tok).or_default() += 1;
            }
        }
    }
    if !any {
        return Err(AnalyticsError::MissingType(personality));
    }
    let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(k);
    Ok(WordCloud { personality, entries })
}

pub fn word_clouds_to_csv(clouds: &[WordCloud]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["type", "rank", "token", "frequency"]).expect("in-memory csv");
    for c in clouds {
        for (rank, (tok, f)) in c.entries.iter().enumerate() {
            w.write_record([c.personality.code(), (rank + 1).to_string(), tok.clone(), f.to_string()])
                .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominant {
    Side(AxisSide),
    Tie,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisComparison {
    pub metric: String,
    pub axis: Axis,
    pub sides: [AxisSide; 2],
    pub means: [f64; 2],
    pub dominant: Dominant,
    /// Larger mean over smaller; `None` when the smaller mean is zero.
    pub ratio: Option<f64>,
}

/// Which side of each axis has the larger pooled mean.
pub fn axis_comparison(report: &StatReport) -> Result<Vec<AxisComparison>, AnalyticsError> {
    [Axis::Attitude, Axis::Perception, Axis::Judgment, Axis::Lifestyle]
        .into_iter()
        .map(|axis| {
            let sides = axis.sides();
            let mean = |s: AxisSide| report.axis_mean(s).ok_or(AnalyticsError::AbsentSide(s));
            let means = [mean(sides[0])?, mean(sides[1])?];
            let dominant = if means[0] > means[1] {
                Dominant::Side(sides[0])
            } else if means[1] > means[0] {
                Dominant::Side(sides[1])
            } else {
                Dominant::Tie
            };
            let (hi, lo) = if means[0] >= means[1] { (means[0], means[1]) } else { (means[1], means[0]) };
            let ratio = (lo != 0.0).then(|| hi / lo);
            Ok(AxisComparison { metric: report.metric.clone(), axis, sides, means, dominant, ratio })
        })
        .collect()
}

pub fn comparisons_to_csv(rows: &[AxisComparison]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "axis", "side_a", "mean_a", "side_b", "mean_b", "dominant", "ratio"])
        .expect("in-memory csv");
    for r in rows {
        let dominant = match r.dominant {
            Dominant::Side(s) => s.letter().to_string(),
            Dominant::Tie => "tie".into(),
        };
        w.write_record([
            r.metric.clone(),
            format!("{:?}", r.axis).to_lowercase(),
            r.sides[0].letter().to_string(),
            format!("{:.6}", r.means[0]),
            r.sides[1].letter().to_string(),
            format!("{:.6}", r.means[1]),
            dominant,
            fmt_opt(r.ratio),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
