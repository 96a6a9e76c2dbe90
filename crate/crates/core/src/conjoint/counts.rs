use serde::{Deserialize, Serialize};

use super::partworths::ImportanceVector;
use super::{Attribute, ChoiceRecord, ConjointError, Design};

/// Selection and display counts for the levels of one attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeTally {
    pub name: String,
    pub levels: Vec<f64>,
    pub selected: Vec<u64>,
    pub offered: Vec<u64>,
}

impl AttributeTally {
    fn empty(attribute: &Attribute) -> Self {
        let n = attribute.level_count();
        Self {
            name: attribute.name.clone(),
            levels: attribute.levels.clone(),
            selected: vec![0; n],
            offered: vec![0; n],
        }
    }

    fn selected_range(&self) -> u64 {
        let max = self.selected.iter().copied().max().unwrap_or(0);
        let min = self.selected.iter().copied().min().unwrap_or(0);
        max - min
    }
}

/// Per-level counts accumulated over a choice stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub attributes: Vec<AttributeTally>,
    pub choices: u64,
}

impl Tally {
    pub fn empty(attributes: &[Attribute]) -> Self {
        Self {
            attributes: attributes.iter().map(AttributeTally::empty).collect(),
            choices: 0,
        }
    }

    /// Builds a tally from already aggregated counts, one row per attribute.
    pub fn from_counts(
        attributes: &[Attribute],
        selected: &[Vec<u64>],
        offered: &[Vec<u64>],
    ) -> Result<Self, ConjointError> {
        if selected.len() != attributes.len() || offered.len() != attributes.len() {
            return Err(ConjointError::InvalidInput(
                "one count row per attribute is required".into(),
            ));
        }
        let mut tally = Self::empty(attributes);
        let mut choices = None;
        for ((cell, sel), off) in tally.attributes.iter_mut().zip(selected).zip(offered) {
            if sel.len() != cell.selected.len() || off.len() != cell.offered.len() {
                return Err(ConjointError::InvalidInput(format!(
                    "attribute {:?}: one count per level",
                    cell.name
                )));
            }
            if sel.iter().zip(off).any(|(s, o)| s > o) {
                return Err(ConjointError::InvalidInput(format!(
                    "attribute {:?}: a level is selected more often than offered",
                    cell.name
                )));
            }
            let total: u64 = sel.iter().sum();
            if *choices.get_or_insert(total) != total {
                return Err(ConjointError::InvalidInput(
                    "every attribute must account for the same number of choices".into(),
                ));
            }
            cell.selected.clone_from(sel);
            cell.offered.clone_from(off);
        }
        tally.choices = choices.unwrap_or(0);
        Ok(tally)
    }

    fn record(&mut self, design: &Design, choice: &ChoiceRecord) -> Result<(), ConjointError> {
        let task = design
            .task(choice.task_id)
            .ok_or(ConjointError::UnknownTask(choice.task_id))?;
        let chosen =
            task.concepts
                .get(choice.chosen_index)
                .ok_or(ConjointError::InvalidChoice {
                    task_id: task.id,
                    index: choice.chosen_index,
                    alternatives: task.concepts.len(),
                })?;
        for concept in &task.concepts {
            for (cell, level) in self.attributes.iter_mut().zip(concept.levels()) {
                cell.offered[*level] += 1;
            }
        }
        for (cell, level) in self.attributes.iter_mut().zip(chosen.levels()) {
            cell.selected[*level] += 1;
        }
        self.choices += 1;
        Ok(())
    }
}

/// Accumulates selected and offered counts for every attribute level.
pub fn tally(design: &Design, choices: &[ChoiceRecord]) -> Result<Tally, ConjointError> {
    let mut tally = Tally::empty(&design.attributes);
    for choice in choices {
        tally.record(design, choice)?;
    }
    Ok(tally)
}

/// Count-based utilities: each level's selection count minus the smallest
/// selection count of its attribute.
pub fn utility_counts(tally: &Tally) -> Result<Vec<Vec<f64>>, ConjointError> {
    if tally.choices == 0 {
        return Err(ConjointError::EmptyData);
    }
    Ok(tally
        .attributes
        .iter()
        .map(|cell| {
            let min = cell.selected.iter().copied().min().unwrap_or(0);
            cell.selected.iter().map(|s| (s - min) as f64).collect()
        })
        .collect())
}

/// Level-value utilities: each level value minus the attribute's smallest
/// level value.
pub fn utility_levels(levels: &[f64]) -> Vec<f64> {
    let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    levels.iter().map(|l| l - min).collect()
}

/// Count-based importances: each attribute's selection range over the sum of
/// all ranges.
pub fn importance_counts(tally: &Tally) -> Result<ImportanceVector, ConjointError> {
    for cell in &tally.attributes {
        if cell.offered.iter().filter(|o| **o > 0).count() < 2 {
            return Err(ConjointError::InsufficientOffers {
                attribute: cell.name.clone(),
            });
        }
    }
    let ranges: Vec<(String, f64)> = tally
        .attributes
        .iter()
        .map(|cell| (cell.name.clone(), cell.selected_range() as f64))
        .collect();
    ImportanceVector::from_ranges(ranges)
}
