//! Multi-label dialect identification built from classical parts.
//!
//! Text is turned into three TF-IDF blocks (word n-grams, character n-grams
//! and word-bounded character n-grams) that are scaled by per-block weights
//! and concatenated. A one-vs-rest linear SVM, a random forest and a cosine
//! k-NN classifier sit on top, optionally combined by weighted hard voting.
//! The [`harness`] module ties everything into trainable, serializable
//! pipelines and grid sweeps.

pub mod analyzers;
pub mod classifiers;
pub mod corpus;
pub mod ensemble;
mod error;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod sparse;
pub mod vectorizer;

pub use error::{Error, Result};
