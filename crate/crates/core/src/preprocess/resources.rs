//! Plain-text word lists: one entry per line, `key<TAB>value` for maps.
//! Lines starting with `# ` and blank lines are ignored.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
pub const DEFAULT_SLANG: &str = include_str!("../../data/slang_en.tsv");
pub const DEFAULT_EMOTICONS: &str = include_str!("../../data/emoticons_en.tsv");

fn entries(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with("# ") && *l != "#")
}

pub fn parse_word_list(text: &str) -> HashSet<String> {
    entries(text).map(|(_, l)| l.trim().to_lowercase()).collect()
}

pub fn parse_pairs(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (line, l) in entries(text) {
        let (key, value) = l
            .split_once('\t')
            .ok_or_else(|| Error::format_at(line, "expected key<TAB>value"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::format_at(line, "empty key or value"));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_word_list(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    Ok(parse_word_list(&read(path.as_ref())?))
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<HashMap<String, String>> {
    let path = path.as_ref();
    parse_pairs(&read(path)?).map_err(|e| match e {
        Error::Format { line, message } => Error::Format {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}
