//! Sentence vectors and feature layout.
//!
//! GloVe sentences are the arithmetic mean of their in-vocabulary token
//! vectors (all-zero when nothing matches). Context turns are appended into a
//! single token sequence and pooled independently of the response. The final
//! feature puts the context block before the response block.

mod glove;
mod precomputed;

use std::fmt;
use std::io::{BufRead, BufWriter, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use glove::{load_glove, read_glove, EmbeddingTable};
pub use precomputed::{load_precomputed, read_precomputed, PrecomputedStore, VectorMode};

use crate::error::{Error, Result};
use crate::preprocess::TokenSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Layout {
    ContextThenResponse,
    ResponseOnly,
}

impl Layout {
    pub fn short_name(self) -> &'static str {
        match self {
            Layout::ContextThenResponse => "both",
            Layout::ResponseOnly => "response",
        }
    }

    /// Feature length given the per-field block length.
    pub fn feature_len(self, block: usize) -> usize {
        match self {
            Layout::ContextThenResponse => 2 * block,
            Layout::ResponseOnly => block,
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::ContextThenResponse => "CONTEXT_THEN_RESPONSE",
            Layout::ResponseOnly => "RESPONSE_ONLY",
        })
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" | "CONTEXT_THEN_RESPONSE" => Ok(Layout::ContextThenResponse),
            "response" | "RESPONSE_ONLY" => Ok(Layout::ResponseOnly),
            _ => Err(Error::validation(format!("unknown layout {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout: Layout,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Mean of the in-vocabulary token vectors plus the number of tokens found.
pub fn mean_pool(tokens: &[String], table: &EmbeddingTable) -> (Vec<f64>, usize) {
    let mut sum = vec![0.0f64; table.dim()];
    let mut hits = 0usize;
    for vector in tokens.iter().filter_map(|t| table.get(t)) {
        for (s, &v) in sum.iter_mut().zip(vector) {
            *s += f64::from(v);
        }
        hits += 1;
    }
    if hits > 0 {
        let n = hits as f64;
        sum.iter_mut().for_each(|s| *s /= n);
    }
    (sum, hits)
}

pub fn embed_sentence(tokens: &TokenSeq, table: &EmbeddingTable) -> Vec<f64> {
    mean_pool(tokens, table).0
}

pub fn embed_context(context: &[TokenSeq], table: &EmbeddingTable) -> Vec<f64> {
    embed_sentence(&TokenSeq::concat(context), table)
}

pub fn make_feature(context: &[f64], response: &[f64], layout: Layout) -> Result<FeatureVector> {
    let values = match layout {
        Layout::ContextThenResponse => {
            if context.len() != response.len() {
                return Err(Error::validation(format!(
                    "context block has {} components, response block {}",
                    context.len(),
                    response.len()
                )));
            }
            let mut values = Vec::with_capacity(context.len() * 2);
            values.extend_from_slice(context);
            values.extend_from_slice(response);
            values
        }
        Layout::ResponseOnly => response.to_vec(),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("feature contains a non-finite value"));
    }
    Ok(FeatureVector { values, layout })
}

/// Right-pads (or tail-truncates) a sequence of `dim`-vectors to exactly
/// `target_len` rows and flattens it row-major.
pub fn pad_sequence<V: AsRef<[f64]>>(seq: &[V], target_len: usize, pad: &[f64]) -> Result<Vec<f64>> {
    if target_len == 0 {
        return Err(Error::validation("target_len must be at least 1"));
    }
    let dim = pad.len();
    let mut out = Vec::with_capacity(target_len * dim);
    for (i, row) in seq.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != dim {
            return Err(Error::validation(format!(
                "sequence row {i} has {} components, expected {dim}",
                row.len()
            )));
        }
        if i < target_len {
            out.extend_from_slice(row);
        }
    }
    for _ in seq.len()..target_len {
        out.extend_from_slice(pad);
    }
    Ok(out)
}

/// Writes featurized records as `dim=<len>` followed by `<key> F v1 ... vlen`.
pub fn write_feature_cache<'a>(
    out: impl Write,
    rows: impl IntoIterator<Item = (&'a str, &'a FeatureVector)>,
    feature_len: usize,
) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "dim={feature_len}")?;
    for (key, feature) in rows {
        write!(out, "{key} F")?;
        for v in &feature.values {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Keyed feature rows as read back from a cache file.
pub type CachedRows = Vec<(String, Vec<f64>)>;

/// Reads a feature cache written by [`write_feature_cache`].
pub fn read_feature_cache(reader: impl BufRead) -> Result<(usize, CachedRows)> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format("empty feature cache"))?
        .map_err(|e| Error::format_at(1, e.to_string()))?;
    let len: usize = header
        .trim()
        .strip_prefix("dim=")
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::format_at(1, "expected dim=<length> header"))?;
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.map_err(|e| Error::format_at(line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let key = fields.next().unwrap_or_default().to_string();
        if fields.next() != Some("F") {
            return Err(Error::format_at(line_no, "expected <key> F <values>"));
        }
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::format_at(line_no, format!("bad float {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != len {
            return Err(Error::format_at(
                line_no,
                format!("expected {len} values, found {}", values.len()),
            ));
        }
        rows.push((key, values));
    }
    Ok((len, rows))
}
