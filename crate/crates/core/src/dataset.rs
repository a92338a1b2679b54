//! Shared-task JSON Lines loading with null-row filtering.
//!
//! Training rows carry `label`, `response` and `context`; test rows carry `id`
//! instead of `label`. A row whose response is null/missing/blank, whose context
//! is null/missing, or (training only) whose label is null/missing is dropped and
//! counted. Nothing is ever imputed.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "SARCASM")]
    Sarcasm,
    #[serde(rename = "NOT_SARCASM")]
    NotSarcasm,
}

impl Label {
    /// +1 for SARCASM, -1 for NOT_SARCASM.
    pub fn sign(self) -> f64 {
        match self {
            Label::Sarcasm => 1.0,
            Label::NotSarcasm => -1.0,
        }
    }

    /// Decision from a real-valued score: strictly positive means SARCASM.
    pub fn from_score(score: f64) -> Label {
        if score > 0.0 {
            Label::Sarcasm
        } else {
            Label::NotSarcasm
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Sarcasm => "SARCASM",
            Label::NotSarcasm => "NOT_SARCASM",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Sarcasm => Label::NotSarcasm,
            Label::NotSarcasm => Label::Sarcasm,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SARCASM" => Ok(Label::Sarcasm),
            "NOT_SARCASM" => Ok(Label::NotSarcasm),
            other => Err(Error::validation(format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DatasetKind {
    Train,
    Test,
}

/// One retained dataset row.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// 0-based index of the source line in its file.
    pub line: usize,
    pub id: Option<String>,
    pub label: Option<Label>,
    pub response: String,
    /// Earliest turn first.
    pub context: Vec<String>,
}

impl Record {
    /// Key used to join records with precomputed vectors: `t<line>` for
    /// training rows, the `id` field for test rows.
    pub fn key(&self) -> String {
        match &self.id {
            Some(id) => id.clone(),
            None => format!("t{}", self.line),
        }
    }

    /// Serializes back to the shared-task schema.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(skip_serializing_if = "Option::is_none")]
            id: Option<&'a str>,
            #[serde(skip_serializing_if = "Option::is_none")]
            label: Option<Label>,
            response: &'a str,
            context: &'a [String],
        }
        serde_json::to_string(&Out {
            id: self.id.as_deref(),
            label: self.label,
            response: &self.response,
            context: &self.context,
        })
        .expect("record serialization cannot fail")
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub records: Vec<Record>,
    /// Rows removed by null filtering.
    pub dropped: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Option<Vec<Label>> {
        self.records.iter().map(|r| r.label).collect()
    }
}

/// A row as it appears on disk, before null filtering.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct RawRow {
    #[serde(skip)]
    pub line: usize,
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub response: Option<String>,
    #[serde(default)]
    pub context: Option<Vec<String>>,
}

fn is_null_text(text: &Option<String>) -> bool {
    text.as_deref().is_none_or(|t| t.trim().is_empty())
}

/// Splits rows into those usable for `kind` and a count of the rest.
pub fn drop_null_rows(rows: Vec<RawRow>, kind: DatasetKind) -> (Vec<RawRow>, usize) {
    let before = rows.len();
    let retained: Vec<RawRow> = rows
        .into_iter()
        .filter(|row| {
            let label_missing = kind == DatasetKind::Train && row.label.is_none();
            !(is_null_text(&row.response) || row.context.is_none() || label_missing)
        })
        .collect();
    let dropped = before - retained.len();
    (retained, dropped)
}

/// Parses JSON Lines text. Blank lines are skipped but still advance the line index.
pub fn parse_rows(text: &str) -> Result<Vec<RawRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row: RawRow = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        row.line = idx;
        rows.push(row);
    }
    Ok(rows)
}

fn into_record(row: RawRow, kind: DatasetKind) -> Result<Record> {
    let line_no = row.line + 1;
    let (id, label) = match kind {
        DatasetKind::Train => {
            let raw = row.label.expect("null labels are filtered before conversion");
            let label = raw
                .parse::<Label>()
                .map_err(|e| Error::validation(format!("line {line_no}: {e}")))?;
            (None, Some(label))
        }
        DatasetKind::Test => {
            let id = row
                .id
                .filter(|id| !id.trim().is_empty())
                .ok_or_else(|| Error::validation(format!("line {line_no}: test row has no id")))?;
            // test files normally carry no labels; a gold copy may
            let label = row
                .label
                .map(|raw| raw.parse::<Label>())
                .transpose()
                .map_err(|e| Error::validation(format!("line {line_no}: {e}")))?;
            (Some(id), label)
        }
    };
    Ok(Record {
        line: row.line,
        id,
        label,
        response: row.response.unwrap_or_default(),
        context: row.context.unwrap_or_default(),
    })
}

pub fn parse_dataset(text: &str, kind: DatasetKind) -> Result<Dataset> {
    let rows = parse_rows(text)?;
    let (retained, dropped) = drop_null_rows(rows, kind);
    let records = retained
        .into_iter()
        .map(|row| into_record(row, kind))
        .collect::<Result<Vec<_>>>()?;
    if dropped > 0 {
        log::warn!("dropped {dropped} rows with null fields");
    }
    Ok(Dataset {
        kind,
        records,
        dropped,
    })
}

pub fn load_dataset(path: impl AsRef<Path>, kind: DatasetKind) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, kind)
}

/// Label counts over all rows of a training file, before null filtering.
/// Rows without a label are not counted.
pub fn raw_label_counts(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rows = parse_rows(&text)?;
    let mut sarcastic = 0;
    let mut plain = 0;
    for row in rows {
        match row.label.as_deref() {
            Some("SARCASM") => sarcastic += 1,
            Some("NOT_SARCASM") => plain += 1,
            _ => {}
        }
    }
    Ok((sarcastic, plain))
}
