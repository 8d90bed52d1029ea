//! Compressed weight maps for sparse linear models.
//!
//! A trained sparse linear classifier is, at bottom, a map from feature
//! names to weights, and the feature names dominate its footprint. This
//! crate replaces that map with a key-free structure:
//!
//! - a minimal perfect hash function built level by level over the key
//!   set, evaluated through one rank-indexed bit vector;
//! - per-slot fingerprints that reject non-member lookups with a
//!   configurable false-positive rate (`epsilon`);
//! - linearly quantized weights, stored as small indices into a table of
//!   `k` representative centers.
//!
//! Member lookups are always answered with the quantized weight; a
//! non-member either comes back absent with certainty or, with
//! probability about `epsilon`, picks up some stored parameter's weight.
//! [`model`] adds an n-gram text classifier that can score against either
//! the raw or the compressed parameters, so the accuracy cost of a given
//! `k`/`epsilon` operating point is measurable end to end.

pub mod bits;
pub mod error;
pub mod hash;
pub mod map;
pub mod model;
pub mod mphf;
pub mod quantizer;
pub mod train;

pub use error::{Error, Result};
pub use map::{CompressedWeightMap, LookupResult, LookupStatus, MapStats};
pub use model::{
    evaluate_agreement, extract_features, AgreementReport, Classifier, CompressedModel,
    FeatureVector, SourceModel,
};
pub use mphf::Mphf;
pub use quantizer::QuantizerTable;
pub use train::{read_dataset_tsv, read_dataset_tsv_file, train_sgd, TrainConfig, TrainReport};
