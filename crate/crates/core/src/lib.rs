//! Sarcasm detection pipeline over conversational tweets.
//!
//! The crate is organised the way the data flows:
//!
//! * [`dataset`] reads the shared-task JSON Lines files into [`dataset::Record`]s,
//!   dropping rows with null fields.
//! * [`preprocess`] turns raw text into normalized tokens (tokenize, case fold,
//!   stopwords, slang/emoticon normalization, noise removal, Porter stemming).
//! * [`embeddings`] mean-pools GloVe vectors or ingests precomputed BERT vectors
//!   and lays the context block out before the response block.
//! * [`featurize`] glues the three together for a whole dataset.
//! * [`classifiers`] holds logistic regression, a linear SVM, Gaussian naive
//!   Bayes and a random forest, all trained from scratch and serializable.
//! * [`eval`] computes confusion matrices, precision/recall and F-measure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifiers;
pub mod dataset;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod featurize;
pub mod preprocess;

pub use dataset::{Dataset, DatasetKind, Label, Record};
pub use error::{Error, Result};
