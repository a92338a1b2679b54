//! Tweet text normalization.
//!
//! Steps always run in this order, each one optional:
//! tokenize → case fold → stopword removal → normalize → noise removal → stem.
//!
//! Normalization may itself produce stopwords (`b4` → `before`) and noise
//! removal or stemming may reveal them (`@a` → `a`, `is` → `i`), so when
//! stopword removal is enabled the filter is applied once more to the final
//! tokens.

pub mod porter;
pub mod resources;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered normalized tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenSeq(tokens.into_iter().filter(|t| !t.is_empty()).collect())
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    /// Appends sequences in order.
    pub fn concat<'a>(seqs: impl IntoIterator<Item = &'a TokenSeq>) -> TokenSeq {
        TokenSeq(seqs.into_iter().flat_map(|s| s.0.iter().cloned()).collect())
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq::new(iter.into_iter().map(Into::into).collect())
    }
}

impl PartialEq<[&str]> for TokenSeq {
    fn eq(&self, other: &[&str]) -> bool {
        self.0.len() == other.len() && self.0.iter().zip(other).all(|(a, b)| a == b)
    }
}

impl<const N: usize> PartialEq<[&str; N]> for TokenSeq {
    fn eq(&self, other: &[&str; N]) -> bool {
        self == &other[..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Tokenize,
    CaseFold,
    StopwordRemove,
    Normalize,
    NoiseRemove,
    Stem,
}

impl Step {
    pub const CANONICAL: [Step; 6] = [
        Step::Tokenize,
        Step::CaseFold,
        Step::StopwordRemove,
        Step::Normalize,
        Step::NoiseRemove,
        Step::Stem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Step::Tokenize => "tokenize",
            Step::CaseFold => "case_fold",
            Step::StopwordRemove => "stopword_remove",
            Step::Normalize => "normalize",
            Step::NoiseRemove => "noise_remove",
            Step::Stem => "stem",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Step::CANONICAL
            .into_iter()
            .find(|step| step.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown preprocessing step {s:?}")))
    }
}

/// Anything that can answer "is this token in the embedding vocabulary".
/// Used to arbitrate how far an elongated word is collapsed.
pub trait Vocabulary {
    fn contains_token(&self, token: &str) -> bool;
}

impl Vocabulary for HashSet<String> {
    fn contains_token(&self, token: &str) -> bool {
        self.contains(token)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    stopwords: HashSet<String>,
    slang: HashMap<String, String>,
    /// Keys stored lowercase; lookups are case-insensitive.
    emoticons: HashMap<String, String>,
    steps: Vec<Step>,
    max_repeat: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig::new(
            resources::parse_word_list(resources::DEFAULT_STOPWORDS),
            resources::parse_pairs(resources::DEFAULT_SLANG).expect("bundled slang list"),
            resources::parse_pairs(resources::DEFAULT_EMOTICONS).expect("bundled emoticon list"),
            Step::CANONICAL.to_vec(),
            2,
        )
        .expect("bundled configuration is valid")
    }
}

fn is_lower_alpha(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_lowercase())
}

impl PipelineConfig {
    pub fn new(
        stopwords: HashSet<String>,
        slang: HashMap<String, String>,
        emoticons: HashMap<String, String>,
        steps: Vec<Step>,
        max_repeat: usize,
    ) -> Result<Self> {
        if max_repeat < 1 {
            return Err(Error::validation("max_repeat must be at least 1"));
        }
        if !steps.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::validation(format!(
                "steps must follow the order {}",
                Step::CANONICAL.map(Step::name).join(" → ")
            )));
        }
        for (key, value) in slang.iter().chain(emoticons.iter()) {
            if !is_lower_alpha(value) {
                return Err(Error::validation(format!(
                    "replacement for {key:?} must be lowercase alphabetic, got {value:?}"
                )));
            }
        }
        Ok(PipelineConfig {
            stopwords: stopwords.into_iter().map(|w| w.to_lowercase()).collect(),
            slang,
            emoticons: emoticons
                .into_iter()
                .map(|(k, v)| (k.to_lowercase(), v))
                .collect(),
            steps,
            max_repeat,
        })
    }

    pub fn with_steps(self, steps: Vec<Step>) -> Result<Self> {
        PipelineConfig::new(self.stopwords, self.slang, self.emoticons, steps, self.max_repeat)
    }

    pub fn with_stopwords(mut self, stopwords: HashSet<String>) -> Self {
        self.stopwords = stopwords.into_iter().map(|w| w.to_lowercase()).collect();
        self
    }

    /// Adds (or overrides) slang entries.
    pub fn extend_slang(self, extra: HashMap<String, String>) -> Result<Self> {
        let mut slang = self.slang.clone();
        slang.extend(extra);
        PipelineConfig::new(self.stopwords, slang, self.emoticons, self.steps, self.max_repeat)
    }

    /// Adds (or overrides) emoticon entries.
    pub fn extend_emoticons(self, extra: HashMap<String, String>) -> Result<Self> {
        let mut emoticons = self.emoticons.clone();
        emoticons.extend(extra);
        PipelineConfig::new(self.stopwords, self.slang, emoticons, self.steps, self.max_repeat)
    }

    pub fn with_max_repeat(self, max_repeat: usize) -> Result<Self> {
        PipelineConfig::new(self.stopwords, self.slang, self.emoticons, self.steps, max_repeat)
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn slang(&self) -> &HashMap<String, String> {
        &self.slang
    }

    pub fn emoticons(&self) -> &HashMap<String, String> {
        &self.emoticons
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn max_repeat(&self) -> usize {
        self.max_repeat
    }

    fn enabled(&self, step: Step) -> bool {
        self.steps.contains(&step)
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Whitespace split, then strip leading/trailing punctuation. Emoticons known
/// to `emoticons` are kept whole; a `#` directly before the first
/// alphanumeric character survives.
pub fn tokenize(text: &str, emoticons: &HashMap<String, String>) -> TokenSeq {
    let mut tokens = Vec::new();
    for piece in text.split_whitespace() {
        if emoticons.contains_key(&piece.to_lowercase()) {
            tokens.push(piece.to_string());
            continue;
        }
        let trimmed = piece.trim_end_matches(is_punct);
        let Some(start) = trimmed.find(|c: char| !is_punct(c)) else {
            continue;
        };
        let start = if trimmed[..start].ends_with('#') { start - 1 } else { start };
        tokens.push(trimmed[start..].to_string());
    }
    TokenSeq(tokens)
}

/// Lowercases tokens, except words with at least two letters that are all
/// uppercase.
pub fn case_fold(tokens: TokenSeq) -> TokenSeq {
    TokenSeq(
        tokens
            .0
            .into_iter()
            .map(|t| {
                let mut letters = t.chars().filter(|c| c.is_alphabetic()).peekable();
                let mut count = 0;
                let shouting = letters.peek().is_some()
                    && letters.all(|c| {
                        count += 1;
                        c.is_uppercase()
                    });
                if shouting && count >= 2 {
                    t
                } else {
                    t.to_lowercase()
                }
            })
            .collect(),
    )
}

pub fn remove_stopwords(tokens: TokenSeq, stopwords: &HashSet<String>) -> TokenSeq {
    TokenSeq(
        tokens
            .0
            .into_iter()
            .filter(|t| !stopwords.contains(&t.to_lowercase()))
            .collect(),
    )
}

/// Truncates every run of one repeated character to at most `max_run`.
pub fn collapse_runs(token: &str, max_run: usize) -> String {
    let mut out = String::with_capacity(token.len());
    let mut prev = None;
    let mut run = 0;
    for c in token.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= max_run {
            out.push(c);
        }
    }
    out
}

fn normalize_token(
    token: String,
    slang: &HashMap<String, String>,
    emoticons: &HashMap<String, String>,
    max_repeat: usize,
    vocab: Option<&dyn Vocabulary>,
) -> String {
    if let Some(word) = emoticons.get(&token.to_lowercase()) {
        return word.clone();
    }
    let collapsed = collapse_runs(&token, max_repeat);
    if collapsed == token {
        return slang.get(&token).cloned().unwrap_or(token);
    }
    let single = collapse_runs(&token, 1);
    for candidate in [&single, &token, &collapsed] {
        if let Some(word) = slang.get(candidate) {
            return word.clone();
        }
    }
    match vocab {
        Some(vocab) if !vocab.contains_token(&collapsed) => single,
        _ => collapsed,
    }
}

/// Emoticon replacement, elongation collapsing and slang replacement.
///
/// Elongated tokens (a run longer than `max_repeat`) are looked up in the
/// slang map in their run-length-1, original and collapsed forms, in that
/// order. Failing that the collapsed form is kept, unless `vocab` is given
/// and does not contain it, in which case the run-length-1 form is used.
pub fn normalize(
    tokens: TokenSeq,
    slang: &HashMap<String, String>,
    emoticons: &HashMap<String, String>,
    max_repeat: usize,
    vocab: Option<&dyn Vocabulary>,
) -> TokenSeq {
    let emoticons_lower: Option<HashMap<String, String>> =
        if emoticons.keys().any(|k| k.chars().any(char::is_uppercase)) {
            Some(emoticons.iter().map(|(k, v)| (k.to_lowercase(), v.clone())).collect())
        } else {
            None
        };
    let emoticons = emoticons_lower.as_ref().unwrap_or(emoticons);
    TokenSeq(
        tokens
            .0
            .into_iter()
            .map(|t| normalize_token(t, slang, emoticons, max_repeat.max(1), vocab))
            .collect(),
    )
}

/// Deletes every character outside `[a-zA-Z0-9#]`; `#` only survives as the
/// first character of a token. Tokens left empty (or a bare `#`) vanish.
pub fn remove_noise(tokens: TokenSeq) -> TokenSeq {
    TokenSeq(
        tokens
            .0
            .into_iter()
            .filter_map(|t| {
                let mut out = String::with_capacity(t.len());
                for c in t.chars() {
                    if c.is_ascii_alphanumeric() || (c == '#' && out.is_empty()) {
                        out.push(c);
                    }
                }
                (!out.is_empty() && out != "#").then_some(out)
            })
            .collect(),
    )
}

/// Porter-stems plain lowercase words. Hashtags, tokens with digits and
/// preserved all-caps tokens pass through, as does a word the stemmer would
/// erase entirely (a lone "s").
pub fn stem(tokens: TokenSeq) -> TokenSeq {
    TokenSeq(
        tokens
            .0
            .into_iter()
            .map(|t| {
                if t.starts_with('#') || t.chars().any(|c| c.is_ascii_digit() || c.is_uppercase()) {
                    t
                } else {
                    match porter::stem(&t) {
                        s if s.is_empty() => t,
                        s => s,
                    }
                }
            })
            .collect(),
    )
}

pub fn preprocess_text(text: &str, config: &PipelineConfig) -> TokenSeq {
    preprocess_text_with_vocab(text, config, None)
}

/// Runs the enabled steps in canonical order. When `vocab` is present it
/// decides how elongated words are collapsed (see [`normalize`]).
pub fn preprocess_text_with_vocab(
    text: &str,
    config: &PipelineConfig,
    vocab: Option<&dyn Vocabulary>,
) -> TokenSeq {
    let mut tokens = if config.enabled(Step::Tokenize) {
        tokenize(text, &config.emoticons)
    } else {
        text.split_whitespace().collect()
    };
    if config.enabled(Step::CaseFold) {
        tokens = case_fold(tokens);
    }
    if config.enabled(Step::StopwordRemove) {
        tokens = remove_stopwords(tokens, &config.stopwords);
    }
    if config.enabled(Step::Normalize) {
        tokens = normalize(tokens, &config.slang, &config.emoticons, config.max_repeat, vocab);
    }
    if config.enabled(Step::NoiseRemove) {
        tokens = remove_noise(tokens);
    }
    if config.enabled(Step::Stem) {
        tokens = stem(tokens);
    }
    if config.enabled(Step::StopwordRemove) {
        tokens = remove_stopwords(tokens, &config.stopwords);
    }
    tokens
}
