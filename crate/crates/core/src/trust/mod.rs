//! Trust model for user-generated annotations.
//!
//! Trust is a weighted sum of three dimensions:
//!
//! - **stability**: the signed edit count over an observation window,
//! - **credibility**: the mean of the user credibility correction factor
//!   (UCCF, attribution-weighted role power) and the edit-type ratio,
//! - **quality**: credibility restricted to the `n` most active authors.
//!
//! The numeric value is translated into a [`TrustDegree`] either through
//! composite cut points ([`TranslatorThresholds`]) or per-metric bands
//! ([`MetricBands`]).

mod model;
mod score;
mod translate;

pub use model::{
    Annotation, Author, Edit, EditKind, Role, TrustWeights, ATTRIBUTION_SUM_TOLERANCE,
    DEFAULT_ROLE_FACTOR, DEFAULT_ROLE_RANKS,
};
pub use score::{
    credibility, edits_at, edits_types, quality, role_power, score, score_all, stability, trust,
    uccf, DimensionTerms, ScoreParams, TrustScore,
};
pub use translate::{
    classify_metrics, derive_thresholds_ecdf, translate_trust, Band, ClassShares, MetricBands,
    MetricClassification, TranslatorThresholds, TrustDegree,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrustError {
    #[error("invalid interval: start {start} is after end {end}")]
    InvalidInterval { start: i64, end: i64 },
    #[error("author attributions sum to {sum}, expected 1")]
    InvalidAttribution { sum: f64 },
    #[error("edit-type ratio needs at least one complex or simple edit")]
    NoEdits,
    #[error("annotation has no authors")]
    NoAuthors,
    #[error("n-top must be at least 1, got {0}")]
    InvalidTopN(usize),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("invalid metric bands: {0}")]
    InvalidBands(String),
    #[error("value {value} of metric {metric} falls in no band")]
    BandCoverage { metric: &'static str, value: f64 },
    #[error("no values to derive thresholds from")]
    EmptyData,
    #[error("class shares sum to {0}, expected 1")]
    InvalidShares(f64),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("invalid {field}: {reason}")]
    Invariant { field: &'static str, reason: String },
}

impl TrustError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        TrustError::Invariant {
            field,
            reason: reason.into(),
        }
    }

    /// Name of the offending input field, for error ledgers.
    pub fn field(&self) -> &'static str {
        match self {
            TrustError::InvalidInterval { .. } => "interval",
            TrustError::InvalidAttribution { .. } => "attribution",
            TrustError::NoEdits => "edits",
            TrustError::NoAuthors => "authors",
            TrustError::InvalidTopN(_) => "ntop",
            TrustError::InvalidWeights(_) => "weights",
            TrustError::InvalidThresholds(_) => "thresholds",
            TrustError::InvalidBands(_) | TrustError::BandCoverage { .. } => "bands",
            TrustError::EmptyData | TrustError::DegenerateData(_) => "values",
            TrustError::InvalidShares(_) => "shares",
            TrustError::Invariant { field, .. } => field,
        }
    }
}
