use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ConjointError;

/// Trust dimension an attribute stands in for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Stability,
    Credibility,
    Quality,
}

/// A product property with its ordered numeric levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub levels: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<Dimension>,
}

impl Attribute {
    pub fn new(
        name: impl Into<String>,
        levels: Vec<f64>,
        dimension: Option<Dimension>,
    ) -> Result<Self, ConjointError> {
        let attribute = Self {
            name: name.into(),
            levels,
            dimension,
        };
        attribute.validate()?;
        Ok(attribute)
    }

    pub fn validate(&self) -> Result<(), ConjointError> {
        let fail = |reason: &str| {
            Err(ConjointError::InvalidAttribute {
                name: self.name.clone(),
                reason: reason.into(),
            })
        };
        if self.levels.len() < 2 {
            return fail("needs at least two levels");
        }
        if self.levels.iter().any(|l| !l.is_finite()) {
            return fail("level values must be finite");
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return fail("level values must be strictly increasing");
        }
        Ok(())
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }
}

/// One alternative: a level index per attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Concept(pub Vec<usize>);

impl Concept {
    pub fn levels(&self) -> &[usize] {
        &self.0
    }

    fn is_valid_for(&self, attributes: &[Attribute]) -> bool {
        self.0.len() == attributes.len()
            && self
                .0
                .iter()
                .zip(attributes)
                .all(|(i, a)| *i < a.level_count())
    }
}

/// A set of concepts shown together; the respondent picks one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: u32,
    pub concepts: Vec<Concept>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    FullFactorial,
    HalfFraction,
}

/// All level-index combinations, in lexicographic order.
pub fn full_factorial(attributes: &[Attribute]) -> Result<Vec<Concept>, ConjointError> {
    if attributes.is_empty() {
        return Err(ConjointError::InvalidDesign(
            "a design needs at least one attribute".into(),
        ));
    }
    for a in attributes {
        a.validate()?;
    }
    let mut concepts = vec![Vec::with_capacity(attributes.len())];
    for attribute in attributes {
        concepts = concepts
            .into_iter()
            .flat_map(|prefix| {
                (0..attribute.level_count()).map(move |level| {
                    let mut next = prefix.clone();
                    next.push(level);
                    next
                })
            })
            .collect();
    }
    Ok(concepts.into_iter().map(Concept).collect())
}

/// Level counts implied by a complete lattice, or `None` when `concepts` is
/// not one.
fn lattice_shape(concepts: &[Concept]) -> Option<Vec<usize>> {
    let width = concepts.first()?.0.len();
    if width == 0 || concepts.iter().any(|c| c.0.len() != width) {
        return None;
    }
    let shape: Vec<usize> = (0..width)
        .map(|k| concepts.iter().map(|c| c.0[k]).max().unwrap_or(0) + 1)
        .collect();
    let size = shape
        .iter()
        .try_fold(1usize, |acc, n| acc.checked_mul(*n))?;
    let distinct: HashSet<&Concept> = concepts.iter().collect();
    (size == concepts.len() && distinct.len() == size).then_some(shape)
}

/// Half fraction of a full factorial lattice: the concepts whose level-index
/// sum is even, in input order.
pub fn half_fraction(concepts: &[Concept]) -> Result<Vec<Concept>, ConjointError> {
    if lattice_shape(concepts).is_none() {
        return Err(ConjointError::InvalidDesign(
            "input is not a complete factorial lattice".into(),
        ));
    }
    if !concepts.len().is_multiple_of(2) {
        return Err(ConjointError::InvalidDesign(format!(
            "a lattice of {} concepts has no exact half fraction",
            concepts.len()
        )));
    }
    Ok(concepts
        .iter()
        .filter(|c| c.0.iter().sum::<usize>() % 2 == 0)
        .cloned()
        .collect())
}

/// Shuffles `concepts` with a seeded generator and cuts them into tasks of
/// `per_task` alternatives, numbered from 1.
pub fn build_tasks(
    concepts: &[Concept],
    per_task: usize,
    seed: u64,
) -> Result<Vec<Task>, ConjointError> {
    if per_task == 0 || concepts.is_empty() || !concepts.len().is_multiple_of(per_task) {
        return Err(ConjointError::Partition {
            count: concepts.len(),
            per_task,
        });
    }
    let distinct: HashSet<&Concept> = concepts.iter().collect();
    if distinct.len() != concepts.len() {
        return Err(ConjointError::InvalidDesign(
            "concepts must be distinct".into(),
        ));
    }
    let mut shuffled = concepts.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(shuffled
        .chunks(per_task)
        .enumerate()
        .map(|(i, chunk)| Task {
            id: i as u32 + 1,
            concepts: chunk.to_vec(),
        })
        .collect())
}

/// A complete conjoint experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub attributes: Vec<Attribute>,
    pub tasks: Vec<Task>,
    pub kind: DesignKind,
    pub seed: u64,
}

impl Design {
    /// Builds the lattice of `kind` over `attributes` and partitions it into
    /// tasks of `per_task` concepts.
    pub fn generate(
        attributes: Vec<Attribute>,
        kind: DesignKind,
        per_task: usize,
        seed: u64,
    ) -> Result<Self, ConjointError> {
        let lattice = full_factorial(&attributes)?;
        let concepts = match kind {
            DesignKind::FullFactorial => lattice,
            DesignKind::HalfFraction => half_fraction(&lattice)?,
        };
        let tasks = build_tasks(&concepts, per_task, seed)?;
        Ok(Self {
            attributes,
            tasks,
            kind,
            seed,
        })
    }

    pub fn validate(&self) -> Result<(), ConjointError> {
        if self.attributes.is_empty() {
            return Err(ConjointError::InvalidDesign("no attributes".into()));
        }
        for a in &self.attributes {
            a.validate()?;
        }
        if self.tasks.is_empty() {
            return Err(ConjointError::InvalidDesign("no tasks".into()));
        }
        let mut ids = HashSet::new();
        let mut seen = HashSet::new();
        for task in &self.tasks {
            if !ids.insert(task.id) {
                return Err(ConjointError::InvalidDesign(format!(
                    "duplicate task id {}",
                    task.id
                )));
            }
            if task.concepts.len() < 2 {
                return Err(ConjointError::InvalidDesign(format!(
                    "task {} has fewer than two concepts",
                    task.id
                )));
            }
            for concept in &task.concepts {
                if !concept.is_valid_for(&self.attributes) {
                    return Err(ConjointError::InvalidDesign(format!(
                        "task {} holds concept {:?} outside the level lattice",
                        task.id, concept.0
                    )));
                }
                if !seen.insert(concept) {
                    return Err(ConjointError::InvalidDesign(format!(
                        "concept {:?} appears more than once",
                        concept.0
                    )));
                }
            }
        }
        let lattice: usize = self.attributes.iter().map(Attribute::level_count).product();
        let expected = match self.kind {
            DesignKind::FullFactorial => lattice,
            DesignKind::HalfFraction => lattice / 2,
        };
        if seen.len() != expected
            || (self.kind == DesignKind::HalfFraction && !lattice.is_multiple_of(2))
        {
            return Err(ConjointError::InvalidDesign(format!(
                "{:?} design over a lattice of {lattice} must hold {expected} concepts, found {}",
                self.kind,
                seen.len()
            )));
        }
        Ok(())
    }

    pub fn task(&self, id: u32) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn task_index(&self, id: u32) -> Option<usize> {
        self.tasks.iter().position(|t| t.id == id)
    }

    /// Largest number of alternatives in any task.
    pub fn alternatives_per_task(&self) -> usize {
        self.tasks
            .iter()
            .map(|t| t.concepts.len())
            .max()
            .unwrap_or(0)
    }

    /// Largest level count of any attribute.
    pub fn max_level_count(&self) -> usize {
        self.attributes
            .iter()
            .map(Attribute::level_count)
            .max()
            .unwrap_or(0)
    }

    /// Numeric level values of `concept`, one per attribute.
    pub fn level_values(&self, concept: &Concept) -> Vec<f64> {
        concept
            .0
            .iter()
            .zip(&self.attributes)
            .map(|(i, a)| a.levels[*i])
            .collect()
    }

    pub fn summary(&self) -> DesignSummary {
        DesignSummary {
            attributes: self
                .attributes
                .iter()
                .map(|a| AttributeSummary {
                    name: a.name.clone(),
                    levels: a.levels.clone(),
                    dimension: a.dimension,
                })
                .collect(),
            tasks: self.tasks.len(),
            alternatives_per_task: self.alternatives_per_task(),
            kind: self.kind,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub name: String,
    pub levels: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<Dimension>,
}

/// What a respondent-facing client needs to know about a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DesignSummary {
    pub attributes: Vec<AttributeSummary>,
    pub tasks: usize,
    pub alternatives_per_task: usize,
    pub kind: DesignKind,
    pub seed: u64,
}
