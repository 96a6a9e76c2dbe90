use serde::{Deserialize, Serialize};

use super::{Attribute, ConjointError};

/// Allowed deviation of an attribute's utilities from summing to zero.
pub const ZERO_SUM_TOLERANCE: f64 = 1e-6;

/// Effects-coded utilities of one attribute's levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributePartWorths {
    pub name: String,
    pub levels: Vec<f64>,
    pub utilities: Vec<f64>,
}

impl AttributePartWorths {
    pub fn range(&self) -> f64 {
        let max = self
            .utilities
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self.utilities.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Level utilities for every attribute, each attribute summing to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartWorths {
    pub attributes: Vec<AttributePartWorths>,
}

impl PartWorths {
    /// Wraps utilities that already satisfy effects coding.
    pub fn new(attributes: Vec<AttributePartWorths>) -> Result<Self, ConjointError> {
        let pw = Self { attributes };
        pw.validate()?;
        Ok(pw)
    }

    /// Subtracts each attribute's mean utility so every attribute sums to zero.
    pub fn centered(mut attributes: Vec<AttributePartWorths>) -> Result<Self, ConjointError> {
        for a in &mut attributes {
            if a.utilities.is_empty() {
                continue;
            }
            let mean = a.utilities.iter().sum::<f64>() / a.utilities.len() as f64;
            a.utilities.iter_mut().for_each(|u| *u -= mean);
        }
        Self::new(attributes)
    }

    /// The uniform model: every utility zero.
    pub fn zeros(attributes: &[Attribute]) -> Self {
        Self {
            attributes: attributes
                .iter()
                .map(|a| AttributePartWorths {
                    name: a.name.clone(),
                    levels: a.levels.clone(),
                    utilities: vec![0.0; a.level_count()],
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), ConjointError> {
        for a in &self.attributes {
            if a.levels.len() != a.utilities.len() {
                return Err(ConjointError::InvalidInput(format!(
                    "attribute {:?} has {} levels but {} utilities",
                    a.name,
                    a.levels.len(),
                    a.utilities.len()
                )));
            }
            if a.utilities.iter().any(|u| !u.is_finite()) {
                return Err(ConjointError::InvalidInput(format!(
                    "attribute {:?} has a non-finite utility",
                    a.name
                )));
            }
            let sum: f64 = a.utilities.iter().sum();
            if sum.abs() > ZERO_SUM_TOLERANCE {
                return Err(ConjointError::NotZeroSum {
                    attribute: a.name.clone(),
                    sum,
                });
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&AttributePartWorths> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Checks that the level structure matches `attributes`.
    pub fn check_matches(&self, attributes: &[Attribute]) -> Result<(), ConjointError> {
        if self.attributes.len() != attributes.len() {
            return Err(ConjointError::Mismatch(format!(
                "{} attributes in part-worths, {} in design",
                self.attributes.len(),
                attributes.len()
            )));
        }
        for (pw, a) in self.attributes.iter().zip(attributes) {
            if pw.utilities.len() != a.level_count() {
                return Err(ConjointError::Mismatch(format!(
                    "attribute {:?} has {} utilities for {} levels",
                    a.name,
                    pw.utilities.len(),
                    a.level_count()
                )));
            }
        }
        Ok(())
    }
}

/// Relative importance of one attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub attribute: String,
    pub importance: f64,
}

/// Attribute importances, nonnegative and summing to one.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImportanceVector {
    pub entries: Vec<Importance>,
}

impl ImportanceVector {
    /// Normalizes per-attribute ranges into importances.
    pub(crate) fn from_ranges(ranges: Vec<(String, f64)>) -> Result<Self, ConjointError> {
        let total: f64 = ranges.iter().map(|(_, r)| r).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(ConjointError::DegenerateTally(
                "every attribute has the same preference for all its levels".into(),
            ));
        }
        Ok(Self {
            entries: ranges
                .into_iter()
                .map(|(attribute, range)| Importance {
                    attribute,
                    importance: range / total,
                })
                .collect(),
        })
    }

    pub fn get(&self, attribute: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.attribute == attribute)
            .map(|e| e.importance)
    }

    pub fn fractions(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.importance).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Importance of each attribute as its utility range over the sum of ranges.
pub fn importance_partworths(pw: &PartWorths) -> Result<ImportanceVector, ConjointError> {
    if pw.attributes.len() < 2 {
        return Err(ConjointError::TooFewAttributes);
    }
    ImportanceVector::from_ranges(
        pw.attributes
            .iter()
            .map(|a| (a.name.clone(), a.range()))
            .collect(),
    )
}
