use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::Vocabulary;

/// Word vectors read from a GloVe text file, stored contiguously.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    /// Tokens in first-occurrence order.
    tokens: Vec<String>,
    data: Vec<f32>,
    duplicates: usize,
}

impl EmbeddingTable {
    /// An empty table of the given dimension.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("embedding dimension must be positive"));
        }
        Ok(EmbeddingTable {
            dim,
            index: HashMap::new(),
            tokens: Vec::new(),
            data: Vec::new(),
            duplicates: 0,
        })
    }

    /// Inserts or replaces a vector; replacing counts as a duplicate.
    pub fn insert(&mut self, token: &str, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::validation(format!(
                "vector for {token:?} has {} components, table dim is {}",
                vector.len(),
                self.dim
            )));
        }
        if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("vector for {token:?} contains {bad}")));
        }
        match self.index.get(token) {
            Some(&row) => {
                self.data[row * self.dim..(row + 1) * self.dim].copy_from_slice(vector);
                self.duplicates += 1;
            }
            None => {
                self.index.insert(token.to_string(), self.tokens.len());
                self.tokens.push(token.to_string());
                self.data.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of lines that repeated an earlier token (last one wins).
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Exact lookup.
    pub fn get_exact(&self, token: &str) -> Option<&[f32]> {
        self.index
            .get(token)
            .map(|&row| &self.data[row * self.dim..(row + 1) * self.dim])
    }

    /// Exact lookup, falling back to the lowercase form for tokens kept in
    /// capitals by case folding.
    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.get_exact(token).or_else(|| {
            if token.chars().any(char::is_uppercase) {
                self.get_exact(&token.to_lowercase())
            } else {
                None
            }
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.tokens
            .iter()
            .enumerate()
            .map(move |(row, t)| (t.as_str(), &self.data[row * self.dim..(row + 1) * self.dim]))
    }

    /// Writes the table back out in GloVe text format, first-occurrence order.
    pub fn write_to(&self, out: impl Write) -> std::io::Result<()> {
        let mut out = BufWriter::new(out);
        for (token, vector) in self.iter() {
            write!(out, "{token}")?;
            for v in vector {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }
}

impl Vocabulary for EmbeddingTable {
    fn contains_token(&self, token: &str) -> bool {
        self.get(token).is_some()
    }
}

/// Parses `token v1 ... vdim` lines; the first line fixes `dim`.
pub fn read_glove(reader: impl BufRead) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    let mut vector = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::format_at(line_no, e.to_string()))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let token = fields.next().unwrap_or_default();
        vector.clear();
        for field in fields {
            let value: f32 = field
                .parse()
                .map_err(|_| Error::format_at(line_no, format!("unparsable float {field:?}")))?;
            if !value.is_finite() {
                return Err(Error::format_at(line_no, format!("non-finite value {field:?}")));
            }
            vector.push(value);
        }
        if token.is_empty() || vector.is_empty() {
            return Err(Error::format_at(line_no, "expected a token followed by floats"));
        }
        let table = match &mut table {
            Some(t) => t,
            None => table.insert(EmbeddingTable::new(vector.len())?),
        };
        if vector.len() != table.dim {
            return Err(Error::format_at(
                line_no,
                format!("expected {} values, found {}", table.dim, vector.len()),
            ));
        }
        table.insert(token, &vector)?;
    }
    let table = table.ok_or_else(|| Error::format("no vectors found, cannot infer dimension"))?;
    if table.duplicates > 0 {
        log::warn!("{} duplicate tokens in embedding file (last one kept)", table.duplicates);
    }
    Ok(table)
}

pub fn load_glove(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_glove(BufReader::with_capacity(1 << 20, file)).map_err(|e| match e {
        Error::Format { line, message } => Error::Format {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}
