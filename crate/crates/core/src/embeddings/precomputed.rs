//! Interchange files carrying per-record context/response vectors.
//!
//! ```text
//! dim=768 mode=POOLED
//! t0 C 0.0123 ...
//! t0 R -0.441 ...
//! ```
//!
//! In `SEQUENCE` mode the header also carries `len=<L>` and each line holds
//! `dim × len` floats, the row-major flattening of `len` token vectors.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pad_sequence;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VectorMode {
    Pooled,
    Sequence,
}

impl fmt::Display for VectorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorMode::Pooled => "POOLED",
            VectorMode::Sequence => "SEQUENCE",
        })
    }
}

impl FromStr for VectorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "POOLED" => Ok(VectorMode::Pooled),
            "SEQUENCE" => Ok(VectorMode::Sequence),
            _ => Err(Error::validation(format!("unknown vector mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecomputedStore {
    dim: usize,
    mode: VectorMode,
    seq_len: Option<usize>,
    keys: Vec<String>,
    entries: HashMap<String, (Vec<f32>, Vec<f32>)>,
}

impl PrecomputedStore {
    pub fn new(dim: usize, mode: VectorMode, seq_len: Option<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("dim must be positive"));
        }
        match (mode, seq_len) {
            (VectorMode::Sequence, None) | (VectorMode::Sequence, Some(0)) => {
                return Err(Error::validation("SEQUENCE mode needs len ≥ 1"))
            }
            (VectorMode::Pooled, Some(_)) => {
                return Err(Error::validation("len is only valid in SEQUENCE mode"))
            }
            _ => {}
        }
        Ok(PrecomputedStore {
            dim,
            mode,
            seq_len,
            keys: Vec::new(),
            entries: HashMap::new(),
        })
    }

    pub fn insert(&mut self, key: &str, context: Vec<f32>, response: Vec<f32>) -> Result<()> {
        let width = self.width();
        if context.len() != width || response.len() != width {
            return Err(Error::validation(format!(
                "vectors for {key} must have {width} components"
            )));
        }
        if self.entries.contains_key(key) {
            return Err(Error::validation(format!("duplicate key {key}")));
        }
        self.keys.push(key.to_string());
        self.entries.insert(key.to_string(), (context, response));
        Ok(())
    }

    /// Per-token dimension from the header.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> VectorMode {
        self.mode
    }

    pub fn seq_len(&self) -> Option<usize> {
        self.seq_len
    }

    /// Number of floats on each vector line.
    pub fn width(&self) -> usize {
        self.dim * self.seq_len.unwrap_or(1)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn get(&self, key: &str) -> Option<(&[f32], &[f32])> {
        self.entries
            .get(key)
            .map(|(c, r)| (c.as_slice(), r.as_slice()))
    }

    /// Context and response vectors as `f64`. In `SEQUENCE` mode a
    /// `target_len` different from the stored length re-pads (or truncates)
    /// both sequences with zero rows.
    pub fn vectors(&self, key: &str, target_len: Option<usize>) -> Result<(Vec<f64>, Vec<f64>)> {
        let (c, r) = self
            .get(key)
            .ok_or_else(|| Error::validation(format!("no precomputed vectors for record {key}")))?;
        let widen = |v: &[f32]| v.iter().map(|&x| f64::from(x)).collect::<Vec<f64>>();
        match (self.mode, target_len) {
            (VectorMode::Sequence, Some(t)) if Some(t) != self.seq_len => {
                let pad = vec![0.0; self.dim];
                let repad = |v: &[f32]| {
                    let rows: Vec<Vec<f64>> = v.chunks(self.dim).map(widen).collect();
                    pad_sequence(&rows, t, &pad)
                };
                Ok((repad(c)?, repad(r)?))
            }
            _ => Ok((widen(c), widen(r))),
        }
    }

    pub fn write_to(&self, out: impl Write) -> std::io::Result<()> {
        let mut out = BufWriter::new(out);
        write!(out, "dim={} mode={}", self.dim, self.mode)?;
        if let Some(len) = self.seq_len {
            write!(out, " len={len}")?;
        }
        writeln!(out)?;
        for key in &self.keys {
            let (c, r) = &self.entries[key];
            for (tag, v) in [("C", c), ("R", r)] {
                write!(out, "{key} {tag}")?;
                for x in v {
                    write!(out, " {x}")?;
                }
                writeln!(out)?;
            }
        }
        out.flush()
    }
}

struct Header {
    dim: usize,
    mode: VectorMode,
    seq_len: Option<usize>,
}

fn parse_header(line: &str) -> Result<Header> {
    let mut dim = None;
    let mut mode = VectorMode::Pooled;
    let mut seq_len = None;
    for field in line.split_whitespace() {
        let (name, value) = field
            .split_once('=')
            .ok_or_else(|| Error::format_at(1, format!("bad header field {field:?}")))?;
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::format_at(1, format!("bad {name} value {value:?}")))
        };
        match name {
            "dim" => dim = Some(number()?),
            "len" => seq_len = Some(number()?),
            "mode" => mode = value.parse().map_err(|e: Error| Error::format_at(1, e.to_string()))?,
            _ => return Err(Error::format_at(1, format!("unknown header field {name:?}"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::format_at(1, "header lacks dim=<D>"))?;
    Ok(Header { dim, mode, seq_len })
}

pub fn read_precomputed(reader: impl BufRead) -> Result<PrecomputedStore> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::format_at(1, e.to_string()))?,
        None => return Err(Error::format("empty file, expected a dim=<D> header")),
    };
    let header = parse_header(&header)?;
    let mut store = PrecomputedStore::new(header.dim, header.mode, header.seq_len)
        .map_err(|e| Error::format_at(1, e.to_string()))?;
    let width = store.width();

    let mut keys: Vec<String> = Vec::new();
    // context and response halves seen so far for each key
    type Halves = (Option<Vec<f32>>, Option<Vec<f32>>);
    let mut partial: HashMap<String, Halves> = HashMap::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.map_err(|e| Error::format_at(line_no, e.to_string()))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let key = fields.next().unwrap_or_default();
        let tag = fields.next().unwrap_or_default();
        let values = fields
            .map(|f| match f.parse::<f32>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::format_at(line_no, format!("bad float {f:?}"))),
            })
            .collect::<Result<Vec<f32>>>()?;
        if values.len() != width {
            return Err(Error::format_at(
                line_no,
                format!("expected {width} values per vector, found {}", values.len()),
            ));
        }
        let slot = partial.entry(key.to_string()).or_insert_with(|| {
            keys.push(key.to_string());
            (None, None)
        });
        let target = match tag {
            "C" => &mut slot.0,
            "R" => &mut slot.1,
            other => {
                return Err(Error::format_at(
                    line_no,
                    format!("vector tag must be C or R, got {other:?}"),
                ))
            }
        };
        if target.is_some() {
            return Err(Error::format_at(line_no, format!("duplicate {tag} vector for {key}")));
        }
        *target = Some(values);
    }
    for key in keys {
        match partial.remove(&key) {
            Some((Some(c), Some(r))) => store.insert(&key, c, r)?,
            Some((None, _)) => return Err(Error::format(format!("missing C vector for {key}"))),
            _ => return Err(Error::format(format!("missing R vector for {key}"))),
        }
    }
    Ok(store)
}

pub fn load_precomputed(path: impl AsRef<Path>) -> Result<PrecomputedStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_precomputed(BufReader::with_capacity(1 << 20, file))
}
