//! Dataset → feature matrix.

use rayon::prelude::*;

use crate::classifiers::LabeledMatrix;
use crate::dataset::{Dataset, Label};
use crate::embeddings::{make_feature, mean_pool, EmbeddingTable, FeatureVector, Layout, PrecomputedStore};
use crate::error::{Error, Result};
use crate::preprocess::{preprocess_text_with_vocab, PipelineConfig, TokenSeq};

pub enum FeatureSource {
    Glove(EmbeddingTable),
    /// Vectors produced by the external encoder, joined on [`crate::Record::key`].
    /// `seq_len` re-pads SEQUENCE vectors to a different length.
    Precomputed {
        store: PrecomputedStore,
        seq_len: Option<usize>,
    },
}

impl FeatureSource {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureSource::Glove(_) => "GloVe",
            FeatureSource::Precomputed { .. } => "BERT",
        }
    }

    /// Length of one context or response block.
    pub fn block_len(&self) -> usize {
        match self {
            FeatureSource::Glove(t) => t.dim(),
            FeatureSource::Precomputed { store, seq_len } => match (store.seq_len(), seq_len) {
                (Some(_), Some(target)) => store.dim() * target,
                _ => store.width(),
            },
        }
    }

    pub fn feature_len(&self, layout: Layout) -> usize {
        layout.feature_len(self.block_len())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeaturizeStats {
    pub records: usize,
    /// Records whose response had no in-vocabulary token.
    pub oov_responses: usize,
    /// Records whose whole context had no in-vocabulary token.
    pub oov_contexts: usize,
}

#[derive(Debug, Clone)]
pub struct Featurized {
    pub keys: Vec<String>,
    pub features: Vec<FeatureVector>,
    pub labels: Option<Vec<Label>>,
    pub stats: FeaturizeStats,
}

impl Featurized {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn feature_len(&self) -> Option<usize> {
        self.features.first().map(FeatureVector::len)
    }

    /// Requires a labeled dataset.
    pub fn to_matrix(&self) -> Result<LabeledMatrix> {
        let labels = self
            .labels
            .clone()
            .ok_or_else(|| Error::validation("dataset has no labels"))?;
        let rows = self.features.iter().map(|f| f.values.clone()).collect();
        LabeledMatrix::new(rows, labels)
    }
}

/// Preprocessed response and context turns of one record.
pub fn preprocess_record(
    response: &str,
    context: &[String],
    config: &PipelineConfig,
    table: Option<&EmbeddingTable>,
) -> (TokenSeq, Vec<TokenSeq>) {
    let vocab = table.map(|t| t as &dyn crate::preprocess::Vocabulary);
    let response = preprocess_text_with_vocab(response, config, vocab);
    let context = context
        .iter()
        .map(|turn| preprocess_text_with_vocab(turn, config, vocab))
        .collect();
    (response, context)
}

/// Featurizes every record. Work is spread over threads but the output is in
/// dataset order and identical to a sequential run.
pub fn featurize(
    dataset: &Dataset,
    config: &PipelineConfig,
    source: &FeatureSource,
    layout: Layout,
) -> Result<Featurized> {
    let rows: Vec<(FeatureVector, bool, bool)> = dataset
        .records
        .par_iter()
        .map(|record| match source {
            FeatureSource::Glove(table) => {
                let (response, context) = preprocess_record(&record.response, &record.context, config, Some(table));
                let (r, r_hits) = mean_pool(&response, table);
                let (c, c_hits) = mean_pool(&TokenSeq::concat(&context), table);
                Ok((make_feature(&c, &r, layout)?, r_hits == 0, c_hits == 0))
            }
            FeatureSource::Precomputed { store, seq_len } => {
                let (c, r) = store.vectors(&record.key(), *seq_len)?;
                Ok((make_feature(&c, &r, layout)?, false, false))
            }
        })
        .collect::<Result<_>>()?;

    let mut stats = FeaturizeStats {
        records: rows.len(),
        ..Default::default()
    };
    let mut features = Vec::with_capacity(rows.len());
    for (f, r_oov, c_oov) in rows {
        stats.oov_responses += usize::from(r_oov);
        stats.oov_contexts += usize::from(c_oov);
        features.push(f);
    }
    Ok(Featurized {
        keys: dataset.records.iter().map(|r| r.key()).collect(),
        features,
        labels: dataset.labels(),
        stats,
    })
}
