//! Simulate-recover checks for the logit estimator.

use std::time::Instant;

use trustcbc::conjoint::*;
use trustcbc::{presets, Execution};

fn survey_design(seed: u64) -> Design {
    Design::generate(
        presets::survey_attributes(),
        DesignKind::HalfFraction,
        4,
        seed,
    )
    .unwrap()
}

fn max_abs_error(a: &PartWorths, b: &PartWorths) -> f64 {
    a.attributes
        .iter()
        .zip(&b.attributes)
        .flat_map(|(x, y)| {
            x.utilities
                .iter()
                .zip(&y.utilities)
                .map(|(u, v)| (u - v).abs())
        })
        .fold(0.0, f64::max)
}

fn pw_from(rows: &[[f64; 4]]) -> PartWorths {
    PartWorths::centered(
        presets::survey_attributes()
            .iter()
            .zip(rows)
            .map(|(a, u)| AttributePartWorths {
                name: a.name.clone(),
                levels: a.levels.clone(),
                utilities: u.to_vec(),
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn reference_utilities_round_trip() {
    let truth = presets::reference_part_worths();
    let design = survey_design(1);
    let started = Instant::now();
    let choices = simulate_respondents(&truth, &design, 350, 1, Execution::Parallel).unwrap();
    assert_eq!(choices.len(), 350 * 8);
    let fit = fit_logit(&design, &choices, &FitConfig::default()).unwrap();
    let elapsed = started.elapsed();

    let err = max_abs_error(&fit.part_worths, &truth);
    assert!(err <= 0.08, "max utility error {err}");
    let imp = importance_partworths(&fit.part_worths).unwrap();
    for (name, reported) in presets::REPORTED_IMPORTANCES {
        let got = imp.get(name).unwrap();
        assert!(
            (got - reported).abs() <= 0.03,
            "{name}: {got} vs {reported}"
        );
    }
    assert!(elapsed.as_secs_f64() < 10.0, "{elapsed:?}");
}

#[test]
fn null_model_recovers_zero_utilities() {
    let truth = PartWorths::zeros(&presets::survey_attributes());
    let design = survey_design(2);
    let choices = simulate_respondents(&truth, &design, 2500, 3, Execution::Parallel).unwrap();
    let fit = fit_logit(&design, &choices, &FitConfig::default()).unwrap();
    let err = max_abs_error(&fit.part_worths, &truth);
    assert!(err <= 0.05, "{err}");
}

#[test]
fn dominant_attribute_takes_most_importance() {
    let truth = pw_from(&[
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [-3.0, -1.0, 1.0, 3.0],
    ]);
    let design = survey_design(4);
    let choices = simulate_respondents(&truth, &design, 400, 5, Execution::Parallel).unwrap();
    let fit = fit_logit(&design, &choices, &FitConfig::default()).unwrap();
    let imp = importance_partworths(&fit.part_worths).unwrap();
    assert!(imp.get(presets::AUTHOR_RATING).unwrap() > 0.9, "{imp:?}");
}

#[test]
fn simulation_is_deterministic_across_modes() {
    let truth = presets::reference_part_worths();
    let design = survey_design(1);
    let a = simulate_respondents(&truth, &design, 120, 42, Execution::Sequential).unwrap();
    let b = simulate_respondents(&truth, &design, 120, 42, Execution::Parallel).unwrap();
    let c = simulate_respondents(&truth, &design, 120, 42, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(b, c);
    let other = simulate_respondents(&truth, &design, 120, 43, Execution::Parallel).unwrap();
    assert_ne!(a, other);

    let seq = log_likelihood_with(&design, &a, &truth, Execution::Sequential).unwrap();
    let par = log_likelihood_with(&design, &a, &truth, Execution::Parallel).unwrap();
    assert_eq!(seq.to_bits(), par.to_bits());
}

#[test]
fn uniform_model_choices_are_uniform() {
    // Pearson chi-square over the four positions, 3 degrees of freedom.
    // The 0.999 quantile is 16.27.
    let truth = PartWorths::zeros(&presets::survey_attributes());
    let design = survey_design(1);
    let choices = simulate_respondents(&truth, &design, 2000, 7, Execution::Parallel).unwrap();
    let mut counts = [0f64; 4];
    for c in &choices {
        counts[c.chosen_index] += 1.0;
    }
    let expected = choices.len() as f64 / 4.0;
    let chi2: f64 = counts
        .iter()
        .map(|o| (o - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < 16.27, "chi2 {chi2}, counts {counts:?}");
}

#[test]
fn heavily_favored_concept_wins() {
    let truth = pw_from(&[
        [-3.0, -1.0, 1.0, 3.0],
        [-3.0, -1.0, 1.0, 3.0],
        [-3.0, -1.0, 1.0, 3.0],
    ]);
    let attrs = presets::survey_attributes();
    // the top concept against three low ones
    let design = Design {
        attributes: attrs,
        tasks: vec![Task {
            id: 1,
            concepts: vec![
                Concept(vec![3, 3, 3]),
                Concept(vec![0, 0, 1]),
                Concept(vec![1, 0, 0]),
                Concept(vec![0, 1, 0]),
            ],
        }],
        kind: DesignKind::HalfFraction,
        seed: 0,
    };
    let choices = simulate_respondents(&truth, &design, 1000, 11, Execution::Parallel).unwrap();
    let wins = choices.iter().filter(|c| c.chosen_index == 0).count();
    assert!(wins as f64 / 1000.0 > 0.95, "{wins}");
}

#[test]
fn error_shrinks_with_sample_size() {
    let truth = presets::reference_part_worths();
    let design = survey_design(1);
    let errors: Vec<f64> = [50, 350, 2000]
        .iter()
        .map(|n| {
            let choices =
                simulate_respondents(&truth, &design, *n, 1, Execution::Parallel).unwrap();
            let fit = fit_logit(&design, &choices, &FitConfig::default()).unwrap();
            max_abs_error(&fit.part_worths, &truth)
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn fit_rejects_empty_and_unidentifiable_data() {
    let design = survey_design(1);
    assert!(matches!(
        fit_logit(&design, &[], &FitConfig::default()),
        Err(ConjointError::EmptyData)
    ));
    // a single task cannot show every level
    let one_task: Vec<ChoiceRecord> = vec![ChoiceRecord {
        respondent_id: "R1".into(),
        task_id: design.tasks[0].id,
        chosen_index: 0,
        timestamp: 0,
    }];
    assert!(matches!(
        fit_logit(&design, &one_task, &FitConfig::default()),
        Err(ConjointError::Unidentifiable { .. })
    ));
}
