use serde::{Deserialize, Serialize};

use super::{
    build_vocab, concat_features, text_terms, tfidf_fit, FeatureVector, TfidfModel, Unit, VectorizeError,
    VectorizerDoc, Vocabulary,
};
use crate::embed::{doc_embedding, train_word2vec, EmbeddingModel, Word2VecParams};

/// The text block of a feature configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextFeature {
    None,
    Bow,
    Tfidf,
    TfidfNgram,
    TfidfChar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub text: TextFeature,
    pub word2vec: bool,
    pub max_terms: usize,
    pub bow_range: (usize, usize),
    pub ngram_range: (usize, usize),
    pub char_range: (usize, usize),
    pub embedding: Word2VecParams,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            text: TextFeature::Bow,
            word2vec: false,
            max_terms: 1000,
            bow_range: (1, 3),
            ngram_range: (2, 3),
            char_range: (2, 5),
            embedding: Word2VecParams::default(),
        }
    }
}

impl FeatureConfig {
    pub fn new(text: TextFeature, word2vec: bool) -> Self {
        FeatureConfig { text, word2vec, ..Default::default() }
    }

    /// Parses names such as `bow`, `tfidf_char`, `word2vec` or `bow+word2vec`.
    pub fn from_name(name: &str) -> Option<Self> {
        let mut text = TextFeature::None;
        let mut word2vec = false;
        for part in name.split('+') {
            match part.trim() {
                "bow" => text = TextFeature::Bow,
                "tfidf" => text = TextFeature::Tfidf,
                "tfidf_ngram" => text = TextFeature::TfidfNgram,
                "tfidf_char" => text = TextFeature::TfidfChar,
                "word2vec" => word2vec = true,
                _ => return None,
            }
        }
        (text != TextFeature::None || word2vec).then(|| FeatureConfig::new(text, word2vec))
    }

    pub fn name(&self) -> String {
        let text = match self.text {
            TextFeature::None => None,
            TextFeature::Bow => Some("bow"),
            TextFeature::Tfidf => Some("tfidf"),
            TextFeature::TfidfNgram => Some("tfidf_ngram"),
            TextFeature::TfidfChar => Some("tfidf_char"),
        };
        match (text, self.word2vec) {
            (Some(t), false) => t.to_string(),
            (Some(t), true) => format!("{t}+word2vec"),
            (None, _) => "word2vec".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TextVectorizer {
    Bow(Vocabulary),
    Tfidf(TfidfModel),
}

/// A fitted feature pipeline: text vectorizer and/or document embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct Featurizer {
    pub config: FeatureConfig,
    text: Option<TextVectorizer>,
    embedding: Option<EmbeddingModel>,
}

impl Featurizer {
    /// Fits on training texts only.
    pub fn fit(config: &FeatureConfig, texts: &[&str], seed: u64) -> Result<Self, VectorizeError> {
        if config.text == TextFeature::None && !config.word2vec {
            return Err(VectorizeError::EmptyInput);
        }
        let corpus: Vec<Vec<String>> = texts.iter().map(|t| text_terms(t)).collect();
        let m = config.max_terms;
        let text = match config.text {
            TextFeature::None => None,
            TextFeature::Bow => Some(TextVectorizer::Bow(build_vocab(&corpus, Unit::Word, config.bow_range, m)?)),
            TextFeature::Tfidf => Some(TextVectorizer::Tfidf(tfidf_fit(&corpus, Unit::Word, (1, 1), m)?)),
            TextFeature::TfidfNgram => {
                Some(TextVectorizer::Tfidf(tfidf_fit(&corpus, Unit::Word, config.ngram_range, m)?))
            }
            TextFeature::TfidfChar => {
                Some(TextVectorizer::Tfidf(tfidf_fit(&corpus, Unit::Char, config.char_range, m)?))
            }
        };
        let embedding = if config.word2vec {
            Some(
                train_word2vec(&corpus, &config.embedding, seed)
                    .map_err(|e| VectorizeError::Embedding(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Featurizer { config: config.clone(), text, embedding })
    }

    pub fn dim(&self) -> usize {
        let text = match &self.text {
            Some(TextVectorizer::Bow(v)) => v.len(),
            Some(TextVectorizer::Tfidf(m)) => m.vocabulary.len(),
            None => 0,
        };
        text + self.embedding.as_ref().map_or(0, |e| e.dim)
    }

    pub fn transform(&self, text: &str) -> FeatureVector {
        let terms = text_terms(text);
        let mut blocks = Vec::with_capacity(2);
        match &self.text {
            Some(TextVectorizer::Bow(v)) => blocks.push(FeatureVector::single("bow", v.counts(&terms))),
            Some(TextVectorizer::Tfidf(m)) => blocks.push(m.transform(&terms)),
            None => {}
        }
        if let Some(e) = &self.embedding {
            blocks.push(FeatureVector::single("word2vec", doc_embedding(e, &terms)));
        }
        concat_features(&blocks).expect("at least one block")
    }

    pub fn transform_all(&self, texts: &[&str]) -> Vec<Vec<f64>> {
        texts.iter().map(|t| self.transform(t).values).collect()
    }

    pub fn embedding(&self) -> Option<&EmbeddingModel> {
        self.embedding.as_ref()
    }

    pub fn to_json(&self) -> String {
        let doc = FeaturizerDoc {
            schema_version: super::VECTORIZER_SCHEMA_VERSION,
            config: self.config.clone(),
            text: self.text.as_ref().map(|t| match t {
                TextVectorizer::Bow(v) => v.to_doc(),
                TextVectorizer::Tfidf(m) => m.to_doc(),
            }),
            embedding: self.embedding.as_ref().map(|e| {
                let mut buf = Vec::new();
                crate::embed::write_embedding(e, &mut buf).expect("in-memory write");
                EmbeddingBlob { bytes_hex: hex::encode(&buf) }
            }),
        };
        serde_json::to_string(&doc).expect("featurizer serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, VectorizeError> {
        let doc: FeaturizerDoc = serde_json::from_str(json).map_err(|e| VectorizeError::Malformed(e.to_string()))?;
        if doc.schema_version != super::VECTORIZER_SCHEMA_VERSION {
            return Err(VectorizeError::VersionMismatch {
                found: doc.schema_version,
                expected: super::VECTORIZER_SCHEMA_VERSION,
            });
        }
        let text = match (&doc.config.text, doc.text) {
            (TextFeature::None, None) => None,
            (TextFeature::Bow, Some(d)) => Some(TextVectorizer::Bow(Vocabulary::from_doc(&d)?)),
            (TextFeature::Tfidf | TextFeature::TfidfNgram | TextFeature::TfidfChar, Some(d)) => {
                Some(TextVectorizer::Tfidf(TfidfModel::from_doc(&d)?))
            }
            _ => return Err(VectorizeError::Malformed("text vectorizer does not match config".into())),
        };
        let embedding = match (doc.config.word2vec, doc.embedding) {
            (false, None) => None,
            (true, Some(blob)) => {
                let bytes = hex::decode(&blob.bytes_hex).map_err(|e| VectorizeError::Malformed(e.to_string()))?;
                Some(
                    crate::embed::read_embedding(&mut bytes.as_slice())
                        .map_err(|e| VectorizeError::Embedding(e.to_string()))?,
                )
            }
            _ => return Err(VectorizeError::Malformed("embedding does not match config".into())),
        };
        Ok(Featurizer { config: doc.config, text, embedding })
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingBlob {
    bytes_hex: String,
}

#[derive(Serialize, Deserialize)]
struct FeaturizerDoc {
    schema_version: u32,
    config: FeatureConfig,
    text: Option<VectorizerDoc>,
    embedding: Option<EmbeddingBlob>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXTS: [&str; 4] = ["قهوة صباح جميل", "صباح الخير يا جميل", "good morning coffee", "قهوة قهوة #صباح"];

    #[test]
    fn names_round_trip() {
        for name in ["bow", "tfidf", "tfidf_ngram", "tfidf_char", "word2vec", "bow+word2vec", "tfidf_char+word2vec"] {
            assert_eq!(FeatureConfig::from_name(name).unwrap().name(), name);
        }
        assert!(FeatureConfig::from_name("lstm").is_none());
    }

    #[test]
    fn combined_layout() {
        let mut cfg = FeatureConfig::new(TextFeature::Bow, true);
        cfg.embedding = Word2VecParams { dim: 7, min_count: 1, epochs: 1, ..Default::default() };
        let f = Featurizer::fit(&cfg, &TEXTS, 1).unwrap();
        let v = f.transform("قهوة");
        assert_eq!(v.len(), f.dim());
        assert_eq!(v.layout.len(), 2);
        assert_eq!(v.layout[1].len, 7);
        assert!(v.values.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn json_round_trip_reproduces_vectors() {
        for name in ["bow", "tfidf", "tfidf_ngram", "tfidf_char", "tfidf+word2vec"] {
            let mut cfg = FeatureConfig::from_name(name).unwrap();
            cfg.embedding = Word2VecParams { dim: 5, min_count: 1, epochs: 1, ..Default::default() };
            let f = Featurizer::fit(&cfg, &TEXTS, 4).unwrap();
            let back = Featurizer::from_json(&f.to_json()).unwrap();
            assert_eq!(back, f);
            for t in TEXTS {
                assert_eq!(back.transform(t), f.transform(t));
            }
        }
    }
}
