//! Tokenization, stopword removal, and rule-based lemmatization.
//!
//! Tokens are produced by splitting on Unicode whitespace and stripping
//! leading/trailing non-alphanumeric characters; interior hyphens and
//! apostrophes survive. Tokens that are empty after stripping (pure
//! punctuation) are dropped.
//!
//! The lemmatizer is deliberately lightweight: an exceptions dictionary for
//! common irregulars (shipped as a versioned data file) followed by a small
//! ordered suffix-rule table. It only touches all-ASCII-alphabetic tokens.

use std::collections::{HashMap, HashSet};

use super::CorpusError;

/// Shipped default English stopword list.
pub const STOPWORDS_EN: &str = include_str!("../../data/stopwords_en.txt");

/// Shipped default lemma-exceptions table (versioned data file).
pub const LEMMA_EXCEPTIONS: &str = include_str!("../../data/lemma_exceptions.txt");

/// Preprocessing switches applied to every document.
#[derive(Debug, Clone)]
pub struct PreprocessConfig {
    pub lowercase: bool,
    pub remove_stopwords: bool,
    pub stopwords: HashSet<String>,
    pub lemmatize: bool,
    pub lemma_exceptions: HashMap<String, String>,
}

impl Default for PreprocessConfig {
    /// Full pipeline: lowercase, default stopword list, rule lemmatizer.
    fn default() -> Self {
        PreprocessConfig {
            lowercase: true,
            remove_stopwords: true,
            stopwords: default_stopwords(),
            lemmatize: true,
            lemma_exceptions: default_lemma_exceptions(),
        }
    }
}

impl PreprocessConfig {
    /// Tokenize + lowercase only.
    pub fn minimal() -> Self {
        PreprocessConfig {
            lowercase: true,
            remove_stopwords: false,
            stopwords: HashSet::new(),
            lemmatize: false,
            lemma_exceptions: HashMap::new(),
        }
    }

    /// The stopword list must be non-empty when removal is enabled.
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.remove_stopwords && self.stopwords.is_empty() {
            return Err(CorpusError::InvalidConfig(
                "stopword removal enabled but the stopword list is empty".into(),
            ));
        }
        Ok(())
    }
}

/// Parse a word-list file: one term per line, `#` comments and blanks skipped.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn default_stopwords() -> HashSet<String> {
    parse_word_list(STOPWORDS_EN).into_iter().collect()
}

/// Parse a lemma-exceptions table: `surface lemma` pairs, one per line.
pub fn parse_lemma_exceptions(text: &str) -> Result<HashMap<String, String>, CorpusError> {
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match (fields.next(), fields.next(), fields.next()) {
            (Some(surface), Some(lemma), None) => {
                map.insert(surface.to_string(), lemma.to_string());
            }
            _ => {
                return Err(CorpusError::Parse {
                    line: i + 1,
                    message: format!("expected `surface lemma`, got {line:?}"),
                })
            }
        }
    }
    Ok(map)
}

pub fn default_lemma_exceptions() -> HashMap<String, String> {
    parse_lemma_exceptions(LEMMA_EXCEPTIONS).expect("shipped exceptions table parses")
}

/// Split on Unicode whitespace and strip leading/trailing non-alphanumerics.
/// Pure-punctuation tokens vanish.
pub fn tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
}

/// Apply the configured pipeline to one document's text. Token order is
/// preserved; the output may be empty.
pub fn preprocess(text: &str, cfg: &PreprocessConfig) -> Vec<String> {
    tokenize(text)
        .filter_map(|t| {
            let tok = if cfg.lowercase {
                t.to_lowercase()
            } else {
                t.to_string()
            };
            if cfg.remove_stopwords && cfg.stopwords.contains(&tok) {
                return None;
            }
            if cfg.lemmatize {
                Some(lemmatize(&tok, &cfg.lemma_exceptions))
            } else {
                Some(tok)
            }
        })
        .collect()
}

/// Exceptions dictionary first, then the suffix rules.
pub fn lemmatize(token: &str, exceptions: &HashMap<String, String>) -> String {
    if let Some(lemma) = exceptions.get(token) {
        return lemma.clone();
    }
    if !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return token.to_string();
    }
    apply_suffix_rules(token)
}

/// Ordered suffix rules; the first applicable rule wins.
fn apply_suffix_rules(t: &str) -> String {
    let n = t.len();
    // plural endings
    if n > 4 {
        if let Some(stem) = t.strip_suffix("ies") {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = t.strip_suffix("es") {
        if stem.ends_with("ch") || stem.ends_with("sh") || stem.ends_with("ss")
            || stem.ends_with('x') || stem.ends_with('z')
        {
            return stem.to_string();
        }
    }
    if n > 3 && t.ends_with('s') && !t.ends_with("ss") && !t.ends_with("us") && !t.ends_with("is")
    {
        return t[..n - 1].to_string();
    }
    // verbal endings
    if n >= 6 {
        if let Some(stem) = t.strip_suffix("ing") {
            return fix_stem(stem);
        }
    }
    if n >= 5 {
        if let Some(stem) = t.strip_suffix("ed") {
            return fix_stem(stem);
        }
    }
    t.to_string()
}

/// Repair a stem left by stripping `ing`/`ed`: collapse a doubled final
/// consonant (planned -> plan) or restore a dropped `e` on short CVC stems
/// (fil -> file).
fn fix_stem(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b, n - 1) && !matches!(b[n - 1], b'l' | b's' | b'z')
    {
        return stem[..n - 1].to_string();
    }
    if measure(b) == 1 && ends_cvc(b) {
        return format!("{stem}e");
    }
    stem.to_string()
}

fn is_vowel(b: &[u8], i: usize) -> bool {
    match b[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => true,
        b'y' => i > 0 && !is_vowel(b, i - 1),
        _ => false,
    }
}

/// Number of vowel→consonant transitions (Porter's m).
fn measure(b: &[u8]) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..b.len() {
        let v = is_vowel(b, i);
        if prev_vowel && !v {
            m += 1;
        }
        prev_vowel = v;
    }
    m
}

/// Stem ends consonant-vowel-consonant, final consonant not w/x/y.
fn ends_cvc(b: &[u8]) -> bool {
    let n = b.len();
    n >= 3
        && !is_vowel(b, n - 3)
        && is_vowel(b, n - 2)
        && !is_vowel(b, n - 1)
        && !matches!(b[n - 1], b'w' | b'x' | b'y')
}
