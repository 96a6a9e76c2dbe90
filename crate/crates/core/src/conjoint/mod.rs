//! Choice-based conjoint analysis.
//!
//! A [`Design`] groups concepts (one level per attribute) into choice tasks.
//! Respondent selections ([`ChoiceRecord`]) are either tallied and turned
//! into count-based utilities and importances, or fed to a multinomial logit
//! model whose effects-coded part-worths are found with Nelder-Mead.

mod counts;
mod design;
mod logit;
mod partworths;
mod simulate;

pub use counts::{importance_counts, tally, utility_counts, utility_levels, AttributeTally, Tally};
pub use design::{
    build_tasks, full_factorial, half_fraction, Attribute, AttributeSummary, Concept, Design,
    DesignKind, DesignSummary, Dimension, Task,
};
pub use logit::{
    choice_probabilities, fit_logit, log_likelihood, log_likelihood_with, FitConfig, LogitFit,
};
pub use partworths::{
    importance_partworths, AttributePartWorths, Importance, ImportanceVector, PartWorths,
    ZERO_SUM_TOLERANCE,
};
pub use simulate::simulate_respondents;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One respondent's pick within one task.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChoiceRecord {
    pub respondent_id: String,
    pub task_id: u32,
    /// Zero-based position of the chosen concept within the task.
    pub chosen_index: usize,
    pub timestamp: i64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConjointError {
    #[error("invalid attribute {name:?}: {reason}")]
    InvalidAttribute { name: String, reason: String },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("{count} concepts cannot be split into tasks of {per_task}")]
    Partition { count: usize, per_task: usize },
    #[error("unknown task {0}")]
    UnknownTask(u32),
    #[error(
        "choice index {index} out of range for task {task_id} with {alternatives} alternatives"
    )]
    InvalidChoice {
        task_id: u32,
        index: usize,
        alternatives: usize,
    },
    #[error("no choices recorded")]
    EmptyData,
    #[error("degenerate tally: {0}")]
    DegenerateTally(String),
    #[error("attribute {attribute:?} has fewer than two offered levels")]
    InsufficientOffers { attribute: String },
    #[error("level {level} of attribute {attribute:?} was never offered")]
    Unidentifiable { attribute: String, level: f64 },
    #[error("part-worths do not match the design: {0}")]
    Mismatch(String),
    #[error("utilities of attribute {attribute:?} sum to {sum}, expected 0")]
    NotZeroSum { attribute: String, sum: f64 },
    #[error("importance needs at least two attributes")]
    TooFewAttributes,
    #[error("logit fit did not converge after {iterations} iterations (log-likelihood {log_likelihood})")]
    Convergence {
        best: PartWorths,
        log_likelihood: f64,
        iterations: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Outcome of the minimum sample size rule `n·t·a / c ≥ 500`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeCheck {
    pub ratio: f64,
    pub pass: bool,
}

/// Minimum ratio for reliable main-effect estimates.
pub const SAMPLE_SIZE_THRESHOLD: f64 = 500.0;

/// Rule-of-thumb check for `respondents` answering `tasks` tasks of
/// `alternatives` concepts, where `max_levels` is the largest level count of
/// any attribute.
pub fn sample_size_check(
    respondents: u64,
    tasks: u64,
    alternatives: u64,
    max_levels: u64,
) -> Result<SampleSizeCheck, ConjointError> {
    if [respondents, tasks, alternatives, max_levels].contains(&0) {
        return Err(ConjointError::InvalidInput(
            "sample size inputs must all be at least 1".into(),
        ));
    }
    let ratio = (respondents * tasks * alternatives) as f64 / max_levels as f64;
    Ok(SampleSizeCheck {
        ratio,
        pass: ratio >= SAMPLE_SIZE_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_rule() {
        let c = sample_size_check(348, 8, 4, 4).unwrap();
        assert_eq!(c.ratio, 2784.0);
        assert!(c.pass);
        assert_eq!(
            sample_size_check(1, 1, 1, 1).unwrap(),
            SampleSizeCheck {
                ratio: 1.0,
                pass: false
            }
        );
        assert!(sample_size_check(125, 4, 4, 4).unwrap().pass);
        assert!(!sample_size_check(1999, 1, 1, 4).unwrap().pass);
        assert!(sample_size_check(0, 8, 4, 4).is_err());
    }
}
