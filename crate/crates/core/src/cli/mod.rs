//! The `mbti` command-line front end.
//!
//! Exit codes: 0 success, 1 data or validation error, 2 usage error.

mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use config::{Format, RunConfig};

use crate::analytics::{
    age_stats, axis_comparison, bio_feature_aggregate, comparisons_to_csv, level_feature_aggregate,
    profile_stats_by_type, reports_to_csv, reveal_rates, word_cloud, word_clouds_to_csv, zodiac_distribution,
    AnalyticsError, ProfileMetric, RevealField, StatReport, StopList,
};
use crate::corpus::synthetic::{generate_synthetic, SyntheticSpec};
use crate::corpus::{
    balance_by_type, load_tagged, load_tweets, load_users, scan_tagged, scan_tweets, scan_users, split_train_test,
    write_tweets, write_users, PersonalityLabel, TweetRecord, UserRecord,
};
use crate::embed::{save_embedding, train_word2vec, write_text_vectors};
use crate::models::{
    evaluate, evaluate_by_user, load_model, run_benchmark, save_model, train_classifier, Algorithm, BenchmarkOptions,
    ClassifierSpec,
};
use crate::sentiment::{sentiment_shares, train_sentiment, SentimentModel};
use crate::textproc::{BioField, SurfaceField};
use crate::util::sha256_hex;
use crate::vectorize::{text_terms, Featurizer};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "mbti", version, about = "Personality prediction and profile analytics for Arabic tweets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// users.jsonl
    #[arg(long)]
    pub users: Option<PathBuf>,
    /// tweets.jsonl
    #[arg(long)]
    pub tweets: Option<PathBuf>,
    /// JSON run configuration; flags win over file values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats, comma separated
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Profile,
    Bio,
    Levels,
    Wordcloud,
    Sentiment,
    Zodiac,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Schema-check corpora and list every problem with its line number
    Validate {
        #[command(flatten)]
        common: Common,
        /// Sentiment-tagged corpus
        #[arg(long)]
        tagged: Option<PathBuf>,
    },
    /// Write a synthetic corpus with disjoint per-type vocabularies
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        tweets_per_type: usize,
        #[arg(long, default_value_t = 5)]
        users_per_type: usize,
        #[arg(long, default_value_t = 30)]
        vocab: usize,
        /// Full generator spec as JSON instead of the flags above
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Train and evaluate every classifier on every feature configuration
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Feature configurations, comma separated
        #[arg(long, value_delimiter = ',')]
        features: Vec<String>,
        /// Algorithms, comma separated (MLP rows: nn_shallow, ffdl)
        #[arg(long, value_delimiter = ',')]
        algorithms: Vec<String>,
    },
    /// Train one classifier and write the model, featurizer and metrics
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        feature: Option<String>,
        #[arg(long)]
        algorithm: Option<String>,
    },
    /// Label texts (one per line, or JSONL with a "text" field)
    Predict {
        /// Model directory written by `train`, or a model file
        #[arg(long)]
        model: PathBuf,
        /// Featurizer file; defaults to featurizer.json next to the model
        #[arg(long)]
        featurizer: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        /// Emit class probabilities as JSON lines
        #[arg(long)]
        proba: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train word2vec on the tweet corpus
    EmbedTrain {
        #[command(flatten)]
        common: Common,
    },
    /// Train the sentiment classifier on a tagged corpus
    SentimentTrain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tagged: Option<PathBuf>,
    },
    /// Descriptive reports per personality type and axis
    Report {
        #[arg(value_enum)]
        which: ReportKind,
        #[command(flatten)]
        common: Common,
        /// Model written by `sentiment-train`
        #[arg(long)]
        sentiment_model: Option<PathBuf>,
    },
}

/// Parses arguments and runs a command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn effective_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(u) = &common.users {
        cfg.users = Some(u.clone());
    }
    if let Some(t) = &common.tweets {
        cfg.tweets = Some(t.clone());
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    if !common.format.is_empty() {
        cfg.formats = common.format.clone();
    }
    if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        return Err(CliError::Usage(format!("test_fraction must lie in (0, 1), got {}", cfg.test_fraction)));
    }
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(dir.join(name), contents).map_err(|e| data(format!("{}: {e}", dir.join(name).display())))
}

/// Creates the output directory and records the effective config plus a
/// timestamped sidecar.
fn prepare_out(cfg: &RunConfig, command: &str) -> Result<PathBuf, CliError> {
    let dir = cfg.require(&cfg.out, "--out")?.to_path_buf();
    fs::create_dir_all(&dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    write_file(&dir, "config.json", serde_json::to_string_pretty(cfg).expect("config serializes") + "\n")?;
    let started = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let meta = json!({"command": command, "version": env!("CARGO_PKG_VERSION"), "started_unix": started});
    write_file(&dir, "run_meta.json", serde_json::to_string_pretty(&meta).expect("json") + "\n")?;
    Ok(dir)
}

fn load_corpus(cfg: &RunConfig) -> Result<(Vec<UserRecord>, Vec<TweetRecord>), CliError> {
    let users_path = cfg.require(&cfg.users, "--users")?;
    let tweets_path = cfg.require(&cfg.tweets, "--tweets")?;
    let users = load_users(users_path).map_err(|e| data(format!("{}: {e}", users_path.display())))?;
    let tweets = load_tweets(tweets_path, &users).map_err(|e| data(format!("{}: {e}", tweets_path.display())))?;
    Ok((users, tweets))
}

fn load_users_only(cfg: &RunConfig) -> Result<Vec<UserRecord>, CliError> {
    let p = cfg.require(&cfg.users, "--users")?;
    load_users(p).map_err(|e| data(format!("{}: {e}", p.display())))
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializes") + "\n"
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { common, tagged } => cmd_validate(&common, tagged.as_deref()),
        Command::Generate { out, seed, tweets_per_type, users_per_type, vocab, spec } => {
            cmd_generate(&out, seed, tweets_per_type, users_per_type, vocab, spec.as_deref())
        }
        Command::Benchmark { common, features, algorithms } => cmd_benchmark(&common, features, algorithms),
        Command::Train { common, feature, algorithm } => cmd_train(&common, feature, algorithm),
        Command::Predict { model, featurizer, input, proba, out } => {
            cmd_predict(&model, featurizer.as_deref(), &input, proba, out.as_deref())
        }
        Command::EmbedTrain { common } => cmd_embed_train(&common),
        Command::SentimentTrain { common, tagged } => cmd_sentiment_train(&common, tagged),
        Command::Report { which, common, sentiment_model } => cmd_report(which, &common, sentiment_model),
    }
}

fn cmd_validate(common: &Common, tagged: Option<&Path>) -> Result<(), CliError> {
    let cfg = effective_config(common)?;
    let tagged = tagged.or(cfg.tagged.as_deref());
    if cfg.users.is_none() && tagged.is_none() {
        return Err(CliError::Usage("nothing to validate: pass --users (and --tweets) or --tagged".into()));
    }
    let mut problems = 0;
    let mut report = |path: &Path, line: usize, msg: String| {
        problems += 1;
        eprintln!("{}:{line}: {msg}", path.display());
    };
    if let Some(users_path) = cfg.users.as_deref() {
        let scan = scan_users(users_path).map_err(data)?;
        for i in &scan.issues {
            report(users_path, i.line, i.error.to_string());
        }
        println!("{}: {} valid users", users_path.display(), scan.records.len());
        if let Some(tweets_path) = cfg.tweets.as_deref() {
            let t = scan_tweets(tweets_path, &scan.records).map_err(data)?;
            for i in &t.issues {
                report(tweets_path, i.line, i.error.to_string());
            }
            println!("{}: {} valid tweets", tweets_path.display(), t.records.len());
        }
    }
    if let Some(p) = tagged {
        let t = scan_tagged(p).map_err(data)?;
        for i in &t.issues {
            report(p, i.line, i.error.to_string());
        }
        println!("{}: {} valid tagged texts", p.display(), t.records.len());
    }
    if problems > 0 {
        return Err(CliError::Data(format!("{problems} problem(s) found")));
    }
    Ok(())
}

fn cmd_generate(
    out: &Path,
    seed: u64,
    tweets_per_type: usize,
    users_per_type: usize,
    vocab: usize,
    spec: Option<&Path>,
) -> Result<(), CliError> {
    let spec = match spec {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        None => SyntheticSpec::disjoint(tweets_per_type, users_per_type, vocab),
    };
    let (users, tweets) = generate_synthetic(&spec, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::create_dir_all(out).map_err(data)?;
    write_users(&out.join("users.jsonl"), &users).map_err(data)?;
    write_tweets(&out.join("tweets.jsonl"), &tweets).map_err(data)?;
    println!("wrote {} users and {} tweets to {}", users.len(), tweets.len(), out.display());
    Ok(())
}

fn spec_by_name(cfg: &RunConfig, name: &str) -> Result<ClassifierSpec, CliError> {
    if let Some(s) = cfg.classifiers.iter().find(|s| s.display_name() == name) {
        return Ok(s.clone());
    }
    Algorithm::from_name(name)
        .map(ClassifierSpec::new)
        .ok_or_else(|| CliError::Usage(format!("unknown algorithm {name:?}")))
}

fn cmd_benchmark(common: &Common, features: Vec<String>, algorithms: Vec<String>) -> Result<(), CliError> {
    let mut cfg = effective_config(common)?;
    if !features.is_empty() {
        cfg.features = features;
    }
    if !algorithms.is_empty() {
        cfg.classifiers = algorithms.iter().map(|a| spec_by_name(&cfg, a)).collect::<Result<_, _>>()?;
    }
    let feature_configs = cfg.feature_configs()?;
    let specs: Vec<ClassifierSpec> = cfg.classifiers.iter().map(|s| cfg.seeded(s)).collect();
    for s in &specs {
        s.params().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let (_, tweets) = load_corpus(&cfg)?;
    let dir = prepare_out(&cfg, "benchmark")?;
    let options = BenchmarkOptions {
        test_fraction: cfg.test_fraction,
        seed: cfg.seed,
        balance: cfg.balance,
        threads: cfg.threads,
    };
    let table = run_benchmark(&tweets, &feature_configs, &specs, &options).map_err(data)?;
    let csv = table.to_csv();
    if cfg.wants(Format::Csv) {
        write_file(&dir, "benchmark.csv", &csv)?;
    }
    if cfg.wants(Format::Json) {
        write_file(&dir, "benchmark.json", table.to_json() + "\n")?;
    }
    print!("{csv}");
    for c in table.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!("note: {} / {}: {}", c.algorithm, c.feature, c.error.as_deref().unwrap_or_default());
    }
    Ok(())
}

fn cmd_train(common: &Common, feature: Option<String>, algorithm: Option<String>) -> Result<(), CliError> {
    let mut cfg = effective_config(common)?;
    if let Some(f) = feature {
        cfg.feature = f;
    }
    if let Some(a) = algorithm {
        cfg.classifier = spec_by_name(&cfg, &a)?;
    }
    let feature_cfg = cfg.feature_config(&cfg.feature)?;
    let spec = cfg.seeded(&cfg.classifier);
    spec.params().map_err(|e| CliError::Usage(e.to_string()))?;
    let (_, tweets) = load_corpus(&cfg)?;
    let dir = prepare_out(&cfg, "train")?;
    let records = if cfg.balance { balance_by_type(&tweets, cfg.seed).map_err(data)?.into_records() } else { tweets };
    let labels: Vec<String> = records.iter().map(|r| r.label.code()).collect();
    let split = split_train_test(&labels, cfg.test_fraction, cfg.seed).map_err(data)?;
    let texts = |idx: &[usize]| idx.iter().map(|&i| records[i].text.as_str()).collect::<Vec<_>>();
    let ys = |idx: &[usize]| idx.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>();
    let (train_text, test_text) = (texts(&split.train), texts(&split.test));
    let featurizer = Featurizer::fit(&feature_cfg, &train_text, cfg.seed).map_err(data)?;
    let featurizer_json = featurizer.to_json();
    let mut model = train_classifier(&spec, &featurizer.transform_all(&train_text), &ys(&split.train)).map_err(data)?;
    model.metadata.insert("feature".into(), feature_cfg.name());
    model.metadata.insert("featurizer_sha256".into(), sha256_hex(featurizer_json.as_bytes()));
    let test_x = featurizer.transform_all(&test_text);
    let report = evaluate(&model, &test_x, &ys(&split.test)).map_err(data)?;
    let test_users: Vec<&str> = split.test.iter().map(|&i| records[i].user_id.as_str()).collect();
    let by_user = evaluate_by_user(&model, &test_x, &ys(&split.test), &test_users).map_err(data)?;
    write_file(&dir, "featurizer.json", &featurizer_json)?;
    save_model(&model, &dir.join("model.bin")).map_err(data)?;
    let metrics = json!({
        "algorithm": spec.display_name(),
        "feature": feature_cfg.name(),
        "input_dim": featurizer.dim(),
        "n_train": split.train.len(),
        "n_test": split.test.len(),
        "evaluation": report,
        "evaluation_by_user": by_user,
    });
    write_file(&dir, "metrics.json", pretty(&metrics))?;
    println!("accuracy {:.6} f1_macro {:.6} ({} test tweets)", report.accuracy, report.f1_macro, split.test.len());
    Ok(())
}

fn read_inputs(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l)
                .ok()
                .and_then(|v| v.get("text").and_then(|t| t.as_str()).map(String::from))
                .unwrap_or_else(|| l.to_string())
        })
        .collect())
}

fn cmd_predict(
    model: &Path,
    featurizer: Option<&Path>,
    input: &Path,
    proba: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (model_path, dir) = if model.is_dir() {
        (model.join("model.bin"), model.to_path_buf())
    } else {
        (model.to_path_buf(), model.parent().map(Path::to_path_buf).unwrap_or_default())
    };
    let featurizer_path = featurizer.map(Path::to_path_buf).unwrap_or_else(|| dir.join("featurizer.json"));
    let model = load_model(&model_path).map_err(|e| data(format!("{}: {e}", model_path.display())))?;
    let featurizer_json =
        fs::read_to_string(&featurizer_path).map_err(|e| data(format!("{}: {e}", featurizer_path.display())))?;
    let fingerprint = sha256_hex(featurizer_json.as_bytes());
    if model.metadata.get("featurizer_sha256") != Some(&fingerprint) {
        return Err(CliError::Data(format!(
            "VersionMismatch: {} was not produced together with {}",
            featurizer_path.display(),
            model_path.display()
        )));
    }
    let featurizer = Featurizer::from_json(&featurizer_json).map_err(data)?;
    let mut lines = String::new();
    for text in read_inputs(input)? {
        let x = featurizer.transform(&text).values;
        if proba {
            let p = model.predict_proba(&x).map_err(data)?;
            let probs: serde_json::Map<String, serde_json::Value> =
                model.label_set.iter().cloned().zip(p.values.iter().map(|v| json!(v))).collect();
            let label = &model.label_set[crate::util::argmax(&p.values)];
            lines += &(json!({"label": label, "probabilities": probs, "calibrated": p.calibrated}).to_string() + "\n");
        } else {
            lines += model.predict(&x).map_err(data)?;
            lines.push('\n');
        }
    }
    match out {
        Some(p) => fs::write(p, lines).map_err(data)?,
        None => std::io::stdout().write_all(lines.as_bytes()).map_err(data)?,
    }
    Ok(())
}

fn cmd_embed_train(common: &Common) -> Result<(), CliError> {
    let cfg = effective_config(common)?;
    let (_, tweets) = load_corpus(&cfg)?;
    let dir = prepare_out(&cfg, "embed-train")?;
    let corpus: Vec<Vec<String>> = tweets.iter().map(|t| text_terms(&t.text)).collect();
    let model = train_word2vec(&corpus, &cfg.embedding, cfg.seed).map_err(data)?;
    save_embedding(&model, &dir.join("embedding.bin")).map_err(data)?;
    let mut txt = Vec::new();
    write_text_vectors(&model, &mut txt).map_err(data)?;
    write_file(&dir, "vectors.txt", txt)?;
    let metrics = json!({"vocabulary": model.vocab_len(), "dim": model.dim, "epoch_losses": model.epoch_losses});
    write_file(&dir, "metrics.json", pretty(&metrics))?;
    println!("{} terms, dim {}, epoch losses {:?}", model.vocab_len(), model.dim, model.epoch_losses);
    Ok(())
}

fn cmd_sentiment_train(common: &Common, tagged: Option<PathBuf>) -> Result<(), CliError> {
    let mut cfg = effective_config(common)?;
    if tagged.is_some() {
        cfg.tagged = tagged;
    }
    let path = cfg.require(&cfg.tagged, "--tagged")?.to_path_buf();
    let corpus = load_tagged(&path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let dir = prepare_out(&cfg, "sentiment-train")?;
    let model = train_sentiment(&corpus, &cfg.sentiment, cfg.seed).map_err(data)?;
    model.save(&dir.join("sentiment.json")).map_err(data)?;
    let correct = corpus.iter().filter(|t| model.classify(&t.text).label == t.label).count();
    let accuracy = correct as f64 / corpus.len() as f64;
    write_file(&dir, "metrics.json", pretty(&json!({"n": corpus.len(), "train_accuracy": accuracy})))?;
    println!("trained on {} texts, train accuracy {accuracy:.6}", corpus.len());
    Ok(())
}

fn write_stat_reports(cfg: &RunConfig, dir: &Path, stem: &str, reports: &[StatReport]) -> Result<(), CliError> {
    let comparisons: Vec<_> = reports.iter().filter_map(|r| axis_comparison(r).ok()).flatten().collect();
    if cfg.wants(Format::Csv) {
        write_file(dir, &format!("{stem}.csv"), reports_to_csv(reports))?;
        write_file(dir, &format!("{stem}_axes.csv"), comparisons_to_csv(&comparisons))?;
    }
    if cfg.wants(Format::Json) {
        write_file(
            dir,
            &format!("{stem}.json"),
            pretty(&json!({"reports": reports, "axis_comparisons": comparisons})),
        )?;
    }
    if cfg.wants(Format::Svg) {
        for r in reports {
            write_file(dir, &format!("{stem}_{}.svg", r.metric), r.to_svg())?;
        }
    }
    Ok(())
}

fn cmd_report(which: ReportKind, common: &Common, sentiment_model: Option<PathBuf>) -> Result<(), CliError> {
    let mut cfg = effective_config(common)?;
    if sentiment_model.is_some() {
        cfg.sentiment_model = sentiment_model;
    }
    let name = format!("{which:?}").to_lowercase();
    match which {
        ReportKind::Profile => {
            let users = load_users_only(&cfg)?;
            let dir = prepare_out(&cfg, "report profile")?;
            let mut reports: Vec<StatReport> =
                ProfileMetric::ALL.iter().map(|&m| profile_stats_by_type(&users, m)).collect();
            reports.extend(RevealField::ALL.iter().map(|&f| reveal_rates(&users, f)));
            write_stat_reports(&cfg, &dir, &name, &reports)
        }
        ReportKind::Bio => {
            let users = load_users_only(&cfg)?;
            let dir = prepare_out(&cfg, "report bio")?;
            let reports: Vec<StatReport> = BioField::ALL.iter().map(|&f| bio_feature_aggregate(&users, f)).collect();
            write_stat_reports(&cfg, &dir, &name, &reports)
        }
        ReportKind::Levels => {
            let (_, tweets) = load_corpus(&cfg)?;
            let dir = prepare_out(&cfg, "report levels")?;
            let mut reports = Vec::new();
            for level in [0u8, 1] {
                for &f in &SurfaceField::ALL {
                    match level_feature_aggregate(&tweets, level, f) {
                        Ok(r) => reports.push(r),
                        Err(AnalyticsError::EmptyLevel(_)) => {
                            eprintln!("note: no level-{level} tweets");
                            break;
                        }
                        Err(e) => return Err(data(e)),
                    }
                }
            }
            write_stat_reports(&cfg, &dir, &name, &reports)
        }
        ReportKind::Wordcloud => {
            let (_, tweets) = load_corpus(&cfg)?;
            let stop = match &cfg.stop_list {
                Some(p) => StopList::parse(&fs::read_to_string(p).map_err(|e| data(format!("{}: {e}", p.display())))?),
                None => StopList::default_arabic(),
            };
            let dir = prepare_out(&cfg, "report wordcloud")?;
            let mut clouds = Vec::new();
            for l in PersonalityLabel::all() {
                match word_cloud(&tweets, l, cfg.word_cloud_k, &stop) {
                    Ok(c) => clouds.push(c),
                    Err(AnalyticsError::MissingType(_)) => eprintln!("note: no tweets for {l}"),
                    Err(e) => return Err(data(e)),
                }
            }
            if cfg.wants(Format::Csv) {
                write_file(&dir, "wordcloud.csv", word_clouds_to_csv(&clouds))?;
            }
            if cfg.wants(Format::Json) {
                write_file(&dir, "wordcloud.json", pretty(&clouds))?;
            }
            Ok(())
        }
        ReportKind::Sentiment => {
            let model_path = cfg.require(&cfg.sentiment_model, "--sentiment-model")?.to_path_buf();
            let model =
                SentimentModel::load(&model_path).map_err(|e| data(format!("{}: {e}", model_path.display())))?;
            let (_, tweets) = load_corpus(&cfg)?;
            let dir = prepare_out(&cfg, "report sentiment")?;
            let report = sentiment_shares(&model, &tweets, cfg.balance, cfg.seed).map_err(data)?;
            if cfg.wants(Format::Csv) {
                write_file(&dir, "sentiment.csv", report.to_csv())?;
            }
            if cfg.wants(Format::Json) {
                write_file(&dir, "sentiment.json", report.to_json() + "\n")?;
            }
            if cfg.wants(Format::Svg) {
                write_file(&dir, "sentiment.svg", report.to_svg())?;
            }
            Ok(())
        }
        ReportKind::Zodiac => {
            let users = load_users_only(&cfg)?;
            let dir = prepare_out(&cfg, "report zodiac")?;
            let z = zodiac_distribution(&users);
            if cfg.wants(Format::Csv) {
                write_file(&dir, "zodiac.csv", z.to_csv())?;
            }
            if cfg.wants(Format::Json) {
                write_file(&dir, "zodiac.json", z.to_json() + "\n")?;
            }
            if let Some(year) = cfg.reference_year {
                write_stat_reports(&cfg, &dir, "age", &[age_stats(&users, year)])?;
            }
            Ok(())
        }
    }
}
