use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::logit::choice_probabilities;
use super::partworths::PartWorths;
use super::{ChoiceRecord, ConjointError, Design};
use crate::exec::{map_range, Execution};

/// Draws logit choices for `respondents` synthetic respondents, each answering
/// every task of `design` in design order.
///
/// Respondent `r` draws from a ChaCha8 stream `r` keyed by `seed`, so the
/// output is identical for a given seed regardless of execution mode.
/// Respondent ids are `R00001`, `R00002`, …; timestamps count answers in
/// respondent-major order.
pub fn simulate_respondents(
    true_pw: &PartWorths,
    design: &Design,
    respondents: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<ChoiceRecord>, ConjointError> {
    if respondents == 0 {
        return Err(ConjointError::InvalidInput(
            "at least one respondent is required".into(),
        ));
    }
    true_pw.check_matches(&design.attributes)?;
    let task_probabilities: Vec<Vec<f64>> = design
        .tasks
        .iter()
        .map(|task| {
            let values: Vec<f64> = task
                .concepts
                .iter()
                .map(|c| {
                    c.levels()
                        .iter()
                        .zip(&true_pw.attributes)
                        .map(|(level, a)| a.utilities[*level])
                        .sum()
                })
                .collect();
            choice_probabilities(&values)
        })
        .collect();
    let per_respondent = design.tasks.len();

    let batches = map_range(exec, respondents, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        design
            .tasks
            .iter()
            .zip(&task_probabilities)
            .enumerate()
            .map(|(k, (task, probabilities))| ChoiceRecord {
                respondent_id: format!("R{:05}", r + 1),
                task_id: task.id,
                chosen_index: inverse_cdf(probabilities, rng.random::<f64>()),
                timestamp: (r * per_respondent + k) as i64,
            })
            .collect::<Vec<_>>()
    });
    Ok(batches.into_iter().flatten().collect())
}

/// First index whose cumulative probability exceeds `u`.
fn inverse_cdf(probabilities: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    probabilities.len() - 1
}
