use serde::{Deserialize, Serialize};

use super::TrustError;

/// Tolerance on the attribution shares of an author set summing to one.
pub const ATTRIBUTION_SUM_TOLERANCE: f64 = 1e-9;

/// Effort class of an edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    /// Authoring activity, e.g. creating or rewriting an annotation.
    Complex,
    /// Low-effort activity, e.g. voting.
    Simple,
}

fn unit_weight() -> i64 {
    1
}

/// One recorded activity on an annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Edit {
    pub timestamp: i64,
    pub kind: EditKind,
    pub author_id: String,
    /// Contribution to the edit count at `timestamp`; negative for retractions
    /// such as downvotes.
    #[serde(default = "unit_weight")]
    pub weight: i64,
}

impl Edit {
    pub fn new(timestamp: i64, kind: EditKind, author_id: impl Into<String>) -> Self {
        Self {
            timestamp,
            kind,
            author_id: author_id.into(),
            weight: 1,
        }
    }

    pub fn with_weight(mut self, weight: i64) -> Self {
        self.weight = weight;
        self
    }
}

/// Default scale applied to every role rank.
pub const DEFAULT_ROLE_FACTOR: f64 = 0.025;

/// Platform role of an author.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Role {
    pub name: String,
    pub rank: f64,
    pub role_factor: f64,
}

impl Role {
    pub fn new(name: impl Into<String>, rank: f64, role_factor: f64) -> Self {
        Self {
            name: name.into(),
            rank,
            role_factor,
        }
    }

    /// Looks up a role in the default rank table (editor 25, whitehat 3,
    /// staff 38) with the default role factor.
    pub fn standard(name: &str) -> Option<Self> {
        DEFAULT_ROLE_RANKS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, rank)| Role::new(*n, *rank, DEFAULT_ROLE_FACTOR))
    }

    pub fn validate(&self) -> Result<(), TrustError> {
        if !(self.rank.is_finite() && self.rank >= 0.0) {
            return Err(TrustError::invalid(
                "role.rank",
                format!("rank must be a nonnegative number, got {}", self.rank),
            ));
        }
        if !(self.role_factor.is_finite() && self.role_factor > 0.0) {
            return Err(TrustError::invalid(
                "role.roleFactor",
                format!("role factor must be positive, got {}", self.role_factor),
            ));
        }
        Ok(())
    }
}

/// Default role rank table. Overridable by constructing [`Role`] directly.
pub const DEFAULT_ROLE_RANKS: [(&str, f64); 3] =
    [("editor", 25.0), ("whitehat", 3.0), ("staff", 38.0)];

/// A contributor to an annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Author {
    pub id: String,
    pub role: Role,
    /// Overall earned IQ of the user.
    pub iq: f64,
    /// Share of the annotation's edits made by this user, in `[0, 1]`.
    pub attribution: f64,
    pub complex_edits: u64,
    pub simple_edits: u64,
}

impl Author {
    pub fn validate(&self) -> Result<(), TrustError> {
        self.role.validate()?;
        if !self.iq.is_finite() {
            return Err(TrustError::invalid("iq", "IQ must be finite"));
        }
        if !(0.0..=1.0).contains(&self.attribution) {
            return Err(TrustError::invalid(
                "attribution",
                format!("attribution must lie in [0, 1], got {}", self.attribution),
            ));
        }
        Ok(())
    }

    pub fn total_edits(&self) -> u64 {
        self.complex_edits + self.simple_edits
    }
}

/// A user-generated annotation together with its edit history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotation {
    pub id: String,
    pub created_at: i64,
    #[serde(rename = "editsIQ")]
    pub edits_iq: f64,
    #[serde(default)]
    pub edits: Vec<Edit>,
    #[serde(default)]
    pub authors: Vec<Author>,
}

impl Annotation {
    /// Checks every structural invariant of the annotation and its authors.
    pub fn validate(&self) -> Result<(), TrustError> {
        if !self.edits_iq.is_finite() {
            return Err(TrustError::invalid("editsIQ", "edits IQ must be finite"));
        }
        for edit in &self.edits {
            if edit.timestamp < 0 {
                return Err(TrustError::invalid(
                    "edits.timestamp",
                    format!("negative timestamp {}", edit.timestamp),
                ));
            }
            if edit.timestamp < self.created_at {
                return Err(TrustError::invalid(
                    "createdAt",
                    format!(
                        "edit at {} precedes creation time {}",
                        edit.timestamp, self.created_at
                    ),
                ));
            }
        }
        for author in &self.authors {
            author.validate()?;
        }
        if !self.authors.is_empty() {
            check_attribution_sum(&self.authors)?;
        }
        let counted: u64 = self.authors.iter().map(Author::total_edits).sum();
        let attributed = self
            .edits
            .iter()
            .filter(|e| self.authors.iter().any(|a| a.id == e.author_id))
            .count() as u64;
        if counted != attributed {
            return Err(TrustError::invalid(
                "edits",
                format!(
                    "authors declare {counted} edits but {attributed} edits are attributed to them"
                ),
            ));
        }
        Ok(())
    }

    /// Earliest edit timestamp, or the creation time for an unedited annotation.
    pub fn first_activity(&self) -> i64 {
        self.edits
            .iter()
            .map(|e| e.timestamp)
            .min()
            .unwrap_or(self.created_at)
    }

    /// Latest edit timestamp, or the creation time for an unedited annotation.
    pub fn last_activity(&self) -> i64 {
        self.edits
            .iter()
            .map(|e| e.timestamp)
            .max()
            .unwrap_or(self.created_at)
    }
}

pub(crate) fn check_attribution_sum(authors: &[Author]) -> Result<(), TrustError> {
    let sum: f64 = authors.iter().map(|a| a.attribution).sum();
    if (sum - 1.0).abs() > ATTRIBUTION_SUM_TOLERANCE {
        return Err(TrustError::InvalidAttribution { sum });
    }
    Ok(())
}

/// Importance factors of the three trust dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustWeights {
    /// Stability weight.
    pub alpha: f64,
    /// Credibility weight.
    pub beta: f64,
    /// Quality weight.
    pub gamma: f64,
}

impl TrustWeights {
    /// Weights derived from the estimated conjoint importances
    /// (Comments 24.35%, Reader Rating 34.8%, Author Rating 40.85%).
    pub const ESTIMATED: TrustWeights = TrustWeights {
        alpha: 0.2435,
        beta: 0.348,
        gamma: 0.4085,
    };

    /// Rounded weights used in the illustrative trust calculation.
    pub const ILLUSTRATIVE: TrustWeights = TrustWeights {
        alpha: 0.29,
        beta: 0.33,
        gamma: 0.39,
    };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, TrustError> {
        let w = Self { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), TrustError> {
        let parts = [self.alpha, self.beta, self.gamma];
        if parts.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(TrustError::InvalidWeights(format!(
                "weights must be nonnegative, got {parts:?}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        // rounded published weights sum to 1.01
        if !(0.98..=1.02).contains(&sum) {
            return Err(TrustError::InvalidWeights(format!(
                "weights must sum to 1 (±0.02), got {sum}"
            )));
        }
        Ok(())
    }
}

impl Default for TrustWeights {
    fn default() -> Self {
        Self::ESTIMATED
    }
}
