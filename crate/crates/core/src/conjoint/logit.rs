use super::counts::tally;
use super::partworths::{AttributePartWorths, PartWorths};
use super::{ChoiceRecord, ConjointError, Design};
use crate::exec::{chunked_sum, Execution};
use crate::optim::{nelder_mead, NelderMeadConfig, OptimError};

/// Softmax of systematic utilities, shifted by the maximum for stability.
pub fn choice_probabilities(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Choices resolved against a design into flat utility indices.
pub(crate) struct CompiledChoices {
    width: usize,
    rows: Vec<CompiledRow>,
}

struct CompiledRow {
    /// `alternatives × width` flat utility indices.
    cells: Vec<usize>,
    chosen: usize,
}

impl CompiledChoices {
    pub(crate) fn new(design: &Design, choices: &[ChoiceRecord]) -> Result<Self, ConjointError> {
        let width = design.attributes.len();
        // index of each attribute's first level in the flat utility vector
        let offsets: Vec<usize> = design
            .attributes
            .iter()
            .scan(0, |acc, a| {
                let start = *acc;
                *acc += a.level_count();
                Some(start)
            })
            .collect();
        let rows = choices
            .iter()
            .map(|c| {
                let task = design
                    .task(c.task_id)
                    .ok_or(ConjointError::UnknownTask(c.task_id))?;
                if c.chosen_index >= task.concepts.len() {
                    return Err(ConjointError::InvalidChoice {
                        task_id: c.task_id,
                        index: c.chosen_index,
                        alternatives: task.concepts.len(),
                    });
                }
                let cells = task
                    .concepts
                    .iter()
                    .flat_map(|concept| concept.levels().iter().zip(&offsets).map(|(l, o)| o + l))
                    .collect();
                Ok(CompiledRow {
                    cells,
                    chosen: c.chosen_index,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { width, rows })
    }

    fn row_log_probability(&self, row: &CompiledRow, utilities: &[f64]) -> f64 {
        let value = |alt: &[usize]| alt.iter().map(|i| utilities[*i]).sum::<f64>();
        let alternatives = row.cells.chunks_exact(self.width);
        let max = alternatives
            .clone()
            .map(value)
            .fold(f64::NEG_INFINITY, f64::max);
        let log_total = max
            + alternatives
                .clone()
                .map(|alt| (value(alt) - max).exp())
                .sum::<f64>()
                .ln();
        value(&row.cells[row.chosen * self.width..(row.chosen + 1) * self.width]) - log_total
    }

    pub(crate) fn log_likelihood(&self, utilities: &[f64], exec: Execution) -> f64 {
        chunked_sum(exec, &self.rows, |row| {
            self.row_log_probability(row, utilities)
        })
    }
}

fn flatten(pw: &PartWorths) -> Vec<f64> {
    pw.attributes
        .iter()
        .flat_map(|a| a.utilities.iter().copied())
        .collect()
}

/// Multinomial logit log-likelihood of `choices` under `pw`.
pub fn log_likelihood(
    design: &Design,
    choices: &[ChoiceRecord],
    pw: &PartWorths,
) -> Result<f64, ConjointError> {
    log_likelihood_with(design, choices, pw, Execution::default())
}

/// [`log_likelihood`] with an explicit execution mode.
pub fn log_likelihood_with(
    design: &Design,
    choices: &[ChoiceRecord],
    pw: &PartWorths,
    exec: Execution,
) -> Result<f64, ConjointError> {
    pw.check_matches(&design.attributes)?;
    pw.validate()?;
    let compiled = CompiledChoices::new(design, choices)?;
    Ok(compiled.log_likelihood(&flatten(pw), exec))
}

/// Settings for [`fit_logit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub nelder_mead: NelderMeadConfig,
    /// Extra simplex restarts from the current optimum; restarting stops as
    /// soon as one no longer improves the objective by more than the
    /// simplex tolerance.
    pub restarts: usize,
    /// Execution mode for the likelihood sum over choices.
    pub execution: Execution,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            nelder_mead: NelderMeadConfig::default(),
            restarts: 10,
            execution: Execution::default(),
        }
    }
}

/// Fitted part-worths with fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitFit {
    pub part_worths: PartWorths,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Maps free parameters (all levels but the last, per attribute) to the full
/// effects-coded utility vector.
struct EffectsCoding {
    level_counts: Vec<usize>,
}

impl EffectsCoding {
    fn parameters(&self) -> usize {
        self.level_counts.iter().map(|n| n - 1).sum()
    }

    fn expand_into(&self, params: &[f64], utilities: &mut Vec<f64>) {
        utilities.clear();
        let mut rest = params;
        for n in &self.level_counts {
            let (free, tail) = rest.split_at(n - 1);
            utilities.extend_from_slice(free);
            utilities.push(-free.iter().sum::<f64>());
            rest = tail;
        }
    }

    fn expand(&self, params: &[f64]) -> Vec<f64> {
        let mut u = Vec::with_capacity(params.len() + self.level_counts.len());
        self.expand_into(params, &mut u);
        u
    }
}

/// Maximum-likelihood part-worths by Nelder-Mead on the negative
/// log-likelihood, starting from the uniform model.
pub fn fit_logit(
    design: &Design,
    choices: &[ChoiceRecord],
    config: &FitConfig,
) -> Result<LogitFit, ConjointError> {
    if choices.is_empty() {
        return Err(ConjointError::EmptyData);
    }
    let counts = tally(design, choices)?;
    for cell in &counts.attributes {
        if let Some(level) = cell.offered.iter().position(|o| *o == 0) {
            return Err(ConjointError::Unidentifiable {
                attribute: cell.name.clone(),
                level: cell.levels[level],
            });
        }
    }
    let compiled = CompiledChoices::new(design, choices)?;
    let coding = EffectsCoding {
        level_counts: design.attributes.iter().map(|a| a.level_count()).collect(),
    };
    let exec = config.execution;
    let objective = |params: &[f64]| -compiled.log_likelihood(&coding.expand(params), exec);

    let to_part_worths = |params: &[f64]| {
        let utilities = coding.expand(params);
        let mut rest = utilities.as_slice();
        PartWorths {
            attributes: design
                .attributes
                .iter()
                .map(|a| {
                    let (mine, tail) = rest.split_at(a.level_count());
                    rest = tail;
                    AttributePartWorths {
                        name: a.name.clone(),
                        levels: a.levels.clone(),
                        utilities: mine.to_vec(),
                    }
                })
                .collect(),
        }
    };

    let mut x = vec![0.0; coding.parameters()];
    let mut value = objective(&x);
    let mut iterations = 0;
    let mut evaluations = 1;
    for round in 0..=config.restarts {
        match nelder_mead(objective, &x, &config.nelder_mead) {
            Ok(m) => {
                iterations += m.iterations;
                evaluations += m.evaluations;
                let improvement = value - m.value;
                if m.value <= value {
                    x = m.x;
                    value = m.value;
                }
                if round > 0 && improvement <= config.nelder_mead.tolerance {
                    break;
                }
            }
            Err(OptimError::NotConverged { best }) => {
                let (x, value) = if best.value <= value {
                    (best.x, best.value)
                } else {
                    (x, value)
                };
                return Err(ConjointError::Convergence {
                    best: to_part_worths(&x),
                    log_likelihood: -value,
                    iterations: iterations + best.iterations,
                });
            }
            Err(e) => return Err(ConjointError::InvalidInput(e.to_string())),
        }
    }

    Ok(LogitFit {
        part_worths: to_part_worths(&x),
        log_likelihood: -value,
        iterations,
        evaluations,
    })
}
