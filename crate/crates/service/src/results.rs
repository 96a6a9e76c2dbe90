//! Aggregates over a snapshot of recorded choices.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use trustcbc::conjoint::{
    fit_logit, importance_counts, importance_partworths, sample_size_check, tally, ChoiceRecord,
    ConjointError, Design, FitConfig, ImportanceVector, PartWorths, SampleSizeCheck, Tally,
};

/// Result of a results request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SurveyResults {
    /// No choice has been recorded yet.
    Empty,
    Ready(ResultsReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultsReport {
    pub choices: usize,
    pub respondents: usize,
    pub tally: Tally,
    pub importance_counts: Option<ImportanceVector>,
    pub part_worths: Option<PartWorths>,
    pub log_likelihood: Option<f64>,
    pub importance_partworths: Option<ImportanceVector>,
    pub sample_size_check: SampleSizeCheck,
    /// Why an optional aggregate is missing.
    pub notes: Vec<String>,
}

/// Computes every aggregate from scratch. Parts that the data cannot support
/// yet (for example a level never shown) are left out with a note.
pub fn compute_results(
    design: &Design,
    choices: &[ChoiceRecord],
    config: &FitConfig,
) -> Result<SurveyResults, ConjointError> {
    if choices.is_empty() {
        return Ok(SurveyResults::Empty);
    }
    let counts = tally(design, choices)?;
    let respondents = choices
        .iter()
        .map(|c| c.respondent_id.as_str())
        .collect::<HashSet<_>>()
        .len();
    let mut notes = Vec::new();

    let importance_counts = importance_counts(&counts)
        .map_err(|e| notes.push(format!("count importance: {e}")))
        .ok();
    let fit = fit_logit(design, choices, config)
        .map_err(|e| notes.push(format!("logit fit: {e}")))
        .ok();
    let importance_partworths = fit.as_ref().and_then(|f| {
        importance_partworths(&f.part_worths)
            .map_err(|e| notes.push(format!("part-worth importance: {e}")))
            .ok()
    });
    let sample_size_check = sample_size_check(
        respondents as u64,
        design.tasks.len() as u64,
        design.alternatives_per_task() as u64,
        design.max_level_count() as u64,
    )?;

    Ok(SurveyResults::Ready(ResultsReport {
        choices: choices.len(),
        respondents,
        tally: counts,
        importance_counts,
        log_likelihood: fit.as_ref().map(|f| f.log_likelihood),
        part_worths: fit.map(|f| f.part_worths),
        importance_partworths,
        sample_size_check,
        notes,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use trustcbc::conjoint::{simulate_respondents, DesignKind};
    use trustcbc::{presets, Execution};

    #[test]
    fn empty_marker() {
        let d =
            Design::generate(presets::survey_attributes(), DesignKind::HalfFraction, 4, 1).unwrap();
        assert_eq!(
            compute_results(&d, &[], &FitConfig::default()).unwrap(),
            SurveyResults::Empty
        );
        let json = serde_json::to_value(SurveyResults::Empty).unwrap();
        assert_eq!(json, serde_json::json!({"status": "empty"}));
    }

    #[test]
    fn survey_sized_load_passes_the_sample_rule() {
        let d =
            Design::generate(presets::survey_attributes(), DesignKind::HalfFraction, 4, 1).unwrap();
        let choices = simulate_respondents(
            &presets::reference_part_worths(),
            &d,
            348,
            2,
            Execution::Parallel,
        )
        .unwrap();
        let SurveyResults::Ready(r) = compute_results(&d, &choices, &FitConfig::default()).unwrap()
        else {
            panic!("expected results")
        };
        assert_eq!(r.respondents, 348);
        assert_eq!(r.sample_size_check.ratio, 2784.0);
        assert!(r.sample_size_check.pass);
        assert!(r.part_worths.is_some() && r.notes.is_empty());
    }

    #[test]
    fn partial_data_reports_what_it_can() {
        let d =
            Design::generate(presets::survey_attributes(), DesignKind::HalfFraction, 4, 1).unwrap();
        let one = ChoiceRecord {
            respondent_id: "a".into(),
            task_id: d.tasks[0].id,
            chosen_index: 1,
            timestamp: 0,
        };
        let SurveyResults::Ready(r) = compute_results(&d, &[one], &FitConfig::default()).unwrap()
        else {
            panic!("expected results")
        };
        assert_eq!(r.choices, 1);
        assert!(r.part_worths.is_none());
        assert!(!r.notes.is_empty());
        assert!(!r.sample_size_check.pass);
    }
}
