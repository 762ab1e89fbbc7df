//! Arabic-aware normalization, tweet tokenization and surface-feature counts.
//!
//! All functions here are pure. Counting functions work on raw text;
//! [`normalize`] is applied only on the vectorization path.

mod emoji_table;

use serde::{Deserialize, Serialize};

pub use emoji_table::UNICODE_VERSION as EMOJI_UNICODE_VERSION;

const TATWEEL: char = '\u{0640}';
const ZWJ: char = '\u{200D}';

fn is_arabic_mark(c: char) -> bool {
    matches!(c as u32, 0x064B..=0x065F | 0x0670)
}

fn in_arabic_block(c: char) -> bool {
    matches!(c as u32, 0x0600..=0x06FF | 0x0750..=0x077F | 0x08A0..=0x08FF | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF)
}

fn is_arabic_letter(c: char) -> bool {
    in_arabic_block(c) && (c.is_alphabetic() || is_arabic_mark(c))
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic() || (matches!(c as u32, 0x00C0..=0x024F) && c.is_alphabetic())
}

fn is_combining_latin(c: char) -> bool {
    matches!(c as u32, 0x0300..=0x036F)
}

fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || matches!(c as u32, 0x0660..=0x0669 | 0x06F0..=0x06F9)
}

/// Format characters that carry no visible content on their own.
fn is_invisible(c: char) -> bool {
    c.is_whitespace() || matches!(c as u32, 0x200B..=0x200F | 0x2060..=0x2064 | 0xFE00..=0xFE0F | 0xFEFF | 0x061C)
}

pub fn is_extended_pictographic(c: char) -> bool {
    let cp = c as u32;
    emoji_table::EXTENDED_PICTOGRAPHIC
        .binary_search_by(|&(lo, hi)| {
            if hi < cp {
                std::cmp::Ordering::Less
            } else if lo > cp {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
        .is_ok()
}

fn is_regional_indicator(c: char) -> bool {
    matches!(c as u32, 0x1F1E6..=0x1F1FF)
}

/// Characters that may follow an emoji base within the same emoji.
fn is_emoji_continuation(c: char) -> bool {
    matches!(c as u32, 0xFE0E | 0xFE0F | 0x1F3FB..=0x1F3FF | 0x20E3 | 0xE0020..=0xE007F)
}

/// Strips diacritics and tatweel, unifies alef and ya forms, collapses
/// whitespace runs to one space and trims.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if is_arabic_mark(c) || c == TATWEEL {
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.push(match c {
            'أ' | 'إ' | 'آ' => 'ا',
            'ى' => 'ي',
            other => other,
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
    Url,
    Emoji,
    Punctuation,
    Number,
    LatinWord,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
}

fn is_tag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || is_arabic_mark(c) || is_combining_latin(c)
}

fn starts_url(rest: &[char]) -> bool {
    let prefix: String = rest.iter().take(8).collect::<String>().to_ascii_lowercase();
    prefix.starts_with("http://") || prefix.starts_with("https://") || prefix.starts_with("www.")
}

/// Length of the emoji sequence starting at `s[0]`, if any.
fn emoji_len(s: &[char]) -> Option<usize> {
    let first = s[0];
    if is_regional_indicator(first) {
        let pair = s.len() > 1 && is_regional_indicator(s[1]);
        return Some(if pair { 2 } else { 1 });
    }
    if matches!(first, '0'..='9' | '#' | '*') {
        // keycap: base, optional VS16, U+20E3
        return match s.get(1..) {
            Some(['\u{20E3}', ..]) => Some(2),
            Some(['\u{FE0F}', '\u{20E3}', ..]) => Some(3),
            _ => None,
        };
    }
    if !is_extended_pictographic(first) {
        return None;
    }
    let mut i = 1;
    loop {
        while i < s.len() && is_emoji_continuation(s[i]) {
            i += 1;
        }
        if i + 1 < s.len() && s[i] == ZWJ && is_extended_pictographic(s[i + 1]) {
            i += 2;
        } else {
            return Some(i);
        }
    }
}

/// Splits text into tokens. Whitespace and stray format characters separate
/// tokens and are not emitted.
pub fn tokenize(text: &str) -> Vec<Token> {
    let s: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let push = |tokens: &mut Vec<Token>, chars: &[char], kind| {
        tokens.push(Token { text: chars.iter().collect(), kind });
    };
    while i < s.len() {
        let c = s[i];
        if let Some(n) = emoji_len(&s[i..]) {
            push(&mut tokens, &s[i..i + n], TokenKind::Emoji);
            i += n;
            continue;
        }
        if is_invisible(c) {
            i += 1;
            continue;
        }
        if (c == '#' || c == '@' || c == '＃' || c == '＠') && i + 1 < s.len() && is_tag_char(s[i + 1]) {
            let end = run_end(&s, i + 1, is_tag_char);
            let kind = if c == '#' || c == '＃' { TokenKind::Hashtag } else { TokenKind::Mention };
            let mut chars = s[i..end].to_vec();
            chars[0] = if kind == TokenKind::Hashtag { '#' } else { '@' };
            push(&mut tokens, &chars, kind);
            i = end;
            continue;
        }
        if starts_url(&s[i..]) {
            let end = run_end(&s, i, |c| !c.is_whitespace());
            push(&mut tokens, &s[i..end], TokenKind::Url);
            i = end;
            continue;
        }
        let (end, kind) = if is_arabic_letter(c) {
            (run_end(&s, i, is_arabic_letter), TokenKind::Word)
        } else if is_latin_letter(c) {
            (run_end(&s, i, |c| is_latin_letter(c) || is_combining_latin(c)), TokenKind::LatinWord)
        } else if is_digit(c) {
            (run_end(&s, i, is_digit), TokenKind::Number)
        } else if c.is_alphabetic() {
            let other = |c: char| c.is_alphabetic() && !is_arabic_letter(c) && !is_latin_letter(c);
            (run_end(&s, i, other), TokenKind::Word)
        } else {
            (i + 1, TokenKind::Punctuation)
        };
        push(&mut tokens, &s[i..end], kind);
        i = end;
    }
    tokens
}

fn run_end(s: &[char], start: usize, pred: impl Fn(char) -> bool) -> usize {
    let mut end = start;
    while end < s.len() && pred(s[end]) {
        end += 1;
    }
    end
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFeatures {
    pub n_hashtags: u32,
    pub n_emojis: u32,
    pub n_mentions: u32,
    pub n_words: u32,
    pub n_punctuation: u32,
    pub n_title_words: u32,
    pub n_characters: u32,
    /// Words per Unicode scalar value of the raw text.
    pub word_density: f64,
}

/// Selects one [`SurfaceFeatures`] field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceField {
    Hashtags,
    Emojis,
    Mentions,
    Words,
    Punctuation,
    TitleWords,
    Characters,
    WordDensity,
}

impl SurfaceField {
    pub const ALL: [SurfaceField; 8] = [
        SurfaceField::Hashtags,
        SurfaceField::Emojis,
        SurfaceField::Mentions,
        SurfaceField::Words,
        SurfaceField::Punctuation,
        SurfaceField::TitleWords,
        SurfaceField::Characters,
        SurfaceField::WordDensity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SurfaceField::Hashtags => "hashtags",
            SurfaceField::Emojis => "emojis",
            SurfaceField::Mentions => "mentions",
            SurfaceField::Words => "words",
            SurfaceField::Punctuation => "punctuation",
            SurfaceField::TitleWords => "title_words",
            SurfaceField::Characters => "characters",
            SurfaceField::WordDensity => "word_density",
        }
    }
}

impl SurfaceFeatures {
    pub fn get(&self, field: SurfaceField) -> f64 {
        match field {
            SurfaceField::Hashtags => self.n_hashtags as f64,
            SurfaceField::Emojis => self.n_emojis as f64,
            SurfaceField::Mentions => self.n_mentions as f64,
            SurfaceField::Words => self.n_words as f64,
            SurfaceField::Punctuation => self.n_punctuation as f64,
            SurfaceField::TitleWords => self.n_title_words as f64,
            SurfaceField::Characters => self.n_characters as f64,
            SurfaceField::WordDensity => self.word_density,
        }
    }
}

/// Surface counts over the raw, un-normalized text.
pub fn surface_features(text: &str) -> SurfaceFeatures {
    let mut f = SurfaceFeatures::default();
    for t in tokenize(text) {
        match t.kind {
            TokenKind::Hashtag => f.n_hashtags += 1,
            TokenKind::Mention => f.n_mentions += 1,
            TokenKind::Emoji => f.n_emojis += 1,
            TokenKind::Punctuation => f.n_punctuation += 1,
            TokenKind::Word => f.n_words += 1,
            TokenKind::LatinWord => {
                f.n_words += 1;
                if t.text.chars().next().is_some_and(|c| c.is_uppercase()) {
                    f.n_title_words += 1;
                }
            }
            TokenKind::Url | TokenKind::Number => {}
        }
    }
    f.n_characters = text.chars().count() as u32;
    f.word_density = f.n_words as f64 / f.n_characters.max(1) as f64;
    f
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BioFeatures {
    pub n_emojis: u32,
    pub n_words: u32,
    pub n_mentions: u32,
    pub n_latin_words: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BioField {
    Emojis,
    Words,
    Mentions,
    LatinWords,
}

impl BioField {
    pub const ALL: [BioField; 4] = [BioField::Emojis, BioField::Words, BioField::Mentions, BioField::LatinWords];

    pub fn name(self) -> &'static str {
        match self {
            BioField::Emojis => "bio_emojis",
            BioField::Words => "bio_words",
            BioField::Mentions => "bio_mentions",
            BioField::LatinWords => "bio_latin_words",
        }
    }
}

impl BioFeatures {
    pub fn get(&self, field: BioField) -> u32 {
        match field {
            BioField::Emojis => self.n_emojis,
            BioField::Words => self.n_words,
            BioField::Mentions => self.n_mentions,
            BioField::LatinWords => self.n_latin_words,
        }
    }
}

pub fn bio_features(bio: &str) -> BioFeatures {
    let s = surface_features(bio);
    let n_latin_words = tokenize(bio).iter().filter(|t| t.kind == TokenKind::LatinWord).count() as u32;
    BioFeatures { n_emojis: s.n_emojis, n_words: s.n_words, n_mentions: s.n_mentions, n_latin_words }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn strips_diacritics() {
        // م َ ر ْ ح َ ب ً ا  →  marks U+064E, U+0652, U+064E, U+064B removed
        assert_eq!(normalize("مَرْحَبًا"), "مرحبا");
        assert_eq!(normalize(""), "");
    }

    #[test]
    fn unifies_letter_variants_and_whitespace() {
        assert_eq!(normalize("أحمد  إلى\tآخر"), "احمد الي اخر");
        assert_eq!(normalize("جميـــل"), "جميل");
        assert_eq!(normalize("  a \n b  "), "a b");
    }

    #[test]
    fn basic_token_kinds() {
        use TokenKind::*;
        assert_eq!(kinds("مرحبا @user #وسم 😀"), vec![Word, Mention, Hashtag, Emoji]);
        assert_eq!(kinds(""), vec![]);
        assert_eq!(kinds("see https://t.co/x12 now"), vec![LatinWord, Url, LatinWord]);
        assert_eq!(kinds("عام ٢٠٢٣ 42!؟"), vec![Word, Number, Number, Punctuation, Punctuation]);
        assert_eq!(kinds("# @ #_ok"), vec![Punctuation, Punctuation, Hashtag]);
    }

    #[test]
    fn zwj_family_is_one_emoji() {
        let t = tokenize("👩\u{200D}👩\u{200D}👧");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].kind, TokenKind::Emoji);
    }

    #[test]
    fn modifiers_flags_and_keycaps_merge() {
        assert_eq!(tokenize("👍🏽").len(), 1);
        assert_eq!(tokenize("❤️").len(), 1);
        assert_eq!(kinds("🇸🇦🇪🇬"), vec![TokenKind::Emoji, TokenKind::Emoji]);
        assert_eq!(kinds("1️⃣"), vec![TokenKind::Emoji]);
        assert_eq!(kinds("😀😀"), vec![TokenKind::Emoji, TokenKind::Emoji]);
    }

    #[test]
    fn hashtags_take_mixed_scripts() {
        let t = tokenize("#السعودية_2030 @Ali_99");
        assert_eq!(t[0].text, "#السعودية_2030");
        assert_eq!(t[1].text, "@Ali_99");
    }

    #[test]
    fn surface_counts_by_hand() {
        let f = surface_features("Hello مرحبا #tag @m 😀!");
        assert_eq!(f.n_hashtags, 1);
        assert_eq!(f.n_mentions, 1);
        assert_eq!(f.n_emojis, 1);
        assert_eq!(f.n_words, 2);
        assert_eq!(f.n_title_words, 1);
        assert_eq!(f.n_punctuation, 1);
        assert_eq!(f.n_characters, 22);
    }

    #[test]
    fn empty_text_has_zero_features() {
        assert_eq!(surface_features(""), SurfaceFeatures::default());
    }

    #[test]
    fn density_is_words_per_scalar() {
        // 10 scalars, two words
        let text = "abc def...";
        assert_eq!(text.chars().count(), 10);
        let f = surface_features(text);
        assert_eq!(f.n_words, 2);
        assert!((f.word_density - 0.2).abs() < 1e-15);
    }

    #[test]
    fn bio_counts() {
        let b = bio_features("مهندس @org 😀");
        assert_eq!(b, BioFeatures { n_emojis: 1, n_words: 1, n_mentions: 1, n_latin_words: 0 });
        assert_eq!(bio_features("software engineer").n_latin_words, 2);
        assert_eq!(bio_features(""), BioFeatures::default());
    }

    #[test]
    fn emoji_table_is_sorted() {
        let t = emoji_table::EXTENDED_PICTOGRAPHIC;
        assert!(t.windows(2).all(|w| w[0].1 < w[1].0));
        assert!(t.iter().all(|(a, b)| a <= b));
        assert!(is_extended_pictographic('😀'));
        assert!(!is_extended_pictographic('#'));
        assert!(!is_extended_pictographic('a'));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC*") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once);
        }

        #[test]
        fn normalize_never_grows_or_touches_non_arabic(s in "[a-zA-Z0-9 #@!\u{0621}-\u{0670}\u{0640}😀]*") {
            let n = normalize(&s);
            prop_assert!(n.chars().count() <= s.chars().count());
            let keep = |t: &str| t.chars().filter(|c| !c.is_whitespace() && !in_arabic_block(*c)).collect::<String>();
            prop_assert_eq!(keep(&n), keep(&s));
        }

        #[test]
        fn tokens_only_use_input_characters(s in "\\PC*") {
            for t in tokenize(&s) {
                for c in t.text.chars() {
                    // '#'/'@' may be canonicalized from their full-width forms
                    prop_assert!(s.contains(c) || (c == '#' && s.contains('＃')) || (c == '@' && s.contains('＠')));
                }
            }
        }

        #[test]
        fn marker_counts_bounded(s in "\\PC*") {
            let f = surface_features(&s);
            let n = tokenize(&s).len() as u32;
            prop_assert!(f.n_hashtags + f.n_mentions + f.n_emojis <= n);
            prop_assert!(f.word_density >= 0.0);
            prop_assert_eq!(f.word_density == 0.0, f.n_words == 0);
            let longest = tokenize(&s).iter().map(|t| t.text.chars().count()).max().unwrap_or(0) as u32;
            prop_assert!(f.n_characters >= longest);
            if !s.contains('#') && !s.contains('＃') { prop_assert_eq!(f.n_hashtags, 0); }
            if !s.contains('@') && !s.contains('＠') { prop_assert_eq!(f.n_mentions, 0); }
        }

        #[test]
        fn surface_features_are_deterministic(s in "\\PC*") {
            prop_assert_eq!(surface_features(&s), surface_features(&s));
        }
    }
}
