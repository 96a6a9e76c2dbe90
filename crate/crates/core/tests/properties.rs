use proptest::prelude::*;

use trustcbc::conjoint::*;
use trustcbc::trust::*;
use trustcbc::{presets, Execution};

fn edits_strategy() -> impl Strategy<Value = Vec<Edit>> {
    prop::collection::vec((0i64..200, -2i64..=3, any::<bool>()), 0..60).prop_map(|raw| {
        raw.into_iter()
            .map(|(t, w, complex)| {
                let kind = if complex {
                    EditKind::Complex
                } else {
                    EditKind::Simple
                };
                Edit::new(t, kind, "u").with_weight(w)
            })
            .collect()
    })
}

prop_compose! {
    fn authors_strategy()(raw in prop::collection::vec(
        (0.01f64..1.0, 0.0f64..50.0, -50.0f64..500.0, 0u64..10, 0u64..10), 1..6,
    )) -> Vec<Author> {
        let total: f64 = raw.iter().map(|r| r.0).sum();
        raw.iter()
            .enumerate()
            .map(|(i, (share, rank, iq, ce, se))| Author {
                id: format!("u{i}"),
                role: Role::new("r", *rank, 0.025),
                iq: *iq,
                attribution: share / total,
                complex_edits: *ce,
                simple_edits: *se + 1,
            })
            .collect()
    }
}

fn annotation(edits: Vec<Edit>, authors: Vec<Author>, edits_iq: f64) -> Annotation {
    Annotation {
        id: "p".into(),
        created_at: 0,
        edits_iq,
        edits,
        authors,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn stability_is_interval_additive(edits in edits_strategy(), a in 0i64..200, b in 0i64..200, c in 0i64..200) {
        let mut cuts = [a, b, c];
        cuts.sort();
        let [start, mid, end] = cuts;
        prop_assume!(mid < end);
        let ann = annotation(edits, vec![], 0.0);
        let whole = stability(&ann, start, end).unwrap();
        let left = stability(&ann, start, mid).unwrap();
        let right = stability(&ann, mid + 1, end).unwrap();
        prop_assert_eq!(left + right, whole);
    }
}

proptest! {
    #[test]
    fn quality_equals_credibility_when_all_authors_kept(authors in authors_strategy(), extra in 0usize..3, iq in 0.0f64..100.0) {
        let n = authors.len() + extra;
        let ann = annotation(vec![], authors, iq);
        let q = quality(&ann, n).unwrap();
        let c = credibility(&ann).unwrap();
        prop_assert!((q - c).abs() <= 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn trust_is_linear_in_weights(edits in edits_strategy(), authors in authors_strategy(), iq in 0.0f64..100.0,
                                  a in 0.0f64..1.0, b in 0.0f64..1.0, n in 1usize..5) {
        let g = 1.0 - a * 0.5 - b * 0.5;
        let w = TrustWeights::new(a * 0.5, b * 0.5, g).unwrap();
        let ann = annotation(edits, authors, iq);
        let s = stability(&ann, 0, 200).unwrap() as f64;
        let c = credibility(&ann).unwrap();
        let q = quality(&ann, n).unwrap();
        let t = trust(&ann, &w, n, 0, 200).unwrap();
        prop_assert!((t - (w.alpha * s + w.beta * c + w.gamma * q)).abs() < 1e-9);
    }

    #[test]
    fn uccf_ignores_author_order(authors in authors_strategy(), rotate in 0usize..6) {
        let mut shuffled = authors.clone();
        shuffled.reverse();
        let k = rotate % shuffled.len();
        shuffled.rotate_left(k);
        let a = uccf(&authors).unwrap();
        let b = uccf(&shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn ecdf_thresholds_reproduce_shares(mut values in prop::collection::vec(-1000.0f64..1000.0, 20..400)) {
        values.sort_by(f64::total_cmp);
        values.dedup();
        prop_assume!(values.len() >= 20);
        let shares = ClassShares::default();
        let cuts = derive_thresholds_ecdf(&values, &shares).unwrap();
        let n = values.len() as f64;
        let below = |cut: f64| values.iter().filter(|v| **v < cut).count() as f64;
        prop_assert!((below(cuts.untrusted) - n * shares.very_untrusted).abs() <= 1.0);
        prop_assert!((below(cuts.trusted) - n * (shares.very_untrusted + shares.untrusted)).abs() <= 1.0);
        prop_assert!((below(cuts.very_trusted) - n * (1.0 - shares.very_trusted)).abs() <= 1.0);
    }
}

#[test]
fn translator_is_monotone_on_random_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let t = TranslatorThresholds::default();
    for _ in 0..100_000 {
        let a: f64 = rng.random_range(0.0..30.0);
        let b: f64 = rng.random_range(0.0..30.0);
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        assert!(translate_trust(hi, &t).unwrap() >= translate_trust(lo, &t).unwrap());
    }
}

fn survey_design(seed: u64) -> Design {
    Design::generate(
        presets::survey_attributes(),
        DesignKind::HalfFraction,
        4,
        seed,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn tally_conserves_counts(picks in prop::collection::vec((0usize..8, 0usize..4), 0..300)) {
        let design = survey_design(5);
        let choices: Vec<ChoiceRecord> = picks
            .iter()
            .enumerate()
            .map(|(i, (task, idx))| ChoiceRecord {
                respondent_id: format!("r{}", i / 8),
                task_id: design.tasks[*task].id,
                chosen_index: *idx,
                timestamp: i as i64,
            })
            .collect();
        let t = tally(&design, &choices).unwrap();
        for cell in &t.attributes {
            prop_assert_eq!(cell.selected.iter().sum::<u64>(), choices.len() as u64);
            prop_assert_eq!(cell.offered.iter().sum::<u64>(), 4 * choices.len() as u64);
            prop_assert!(cell.selected.iter().zip(&cell.offered).all(|(s, o)| s <= o));
        }
        // brute-force recount of one cell
        let chosen_level0 = choices
            .iter()
            .filter(|c| design.task(c.task_id).unwrap().concepts[c.chosen_index].levels()[2] == 0)
            .count() as u64;
        prop_assert_eq!(t.attributes[2].selected[0], chosen_level0);
    }

    #[test]
    fn logit_probabilities_normalize_and_ignore_shifts(values in prop::collection::vec(-30.0f64..30.0, 2..8), shift in -100.0f64..100.0) {
        let p = choice_probabilities(&values);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
        for (a, b) in p.iter().zip(choice_probabilities(&shifted)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn count_importance_is_scale_free_and_sums_to_one(
        sel in prop::collection::vec(prop::collection::vec(0u64..50, 4), 3),
        k in 2u64..7,
    ) {
        let attrs = presets::survey_attributes();
        // pad level 0 so every attribute accounts for the same number of choices
        let mut base = sel.clone();
        let target = base.iter().map(|r| r.iter().sum::<u64>()).max().unwrap();
        for r in base.iter_mut() {
            r[0] += target - r.iter().sum::<u64>();
        }
        let offered = vec![vec![1000u64; 4]; 3];
        let t1 = Tally::from_counts(&attrs, &base, &offered).unwrap();
        let Ok(imp1) = importance_counts(&t1) else {
            // every attribute has zero range
            prop_assert!(base.iter().all(|r| r.iter().all(|v| *v == r[0])));
            return Ok(());
        };
        prop_assert!((imp1.fractions().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(imp1.fractions().iter().all(|v| (0.0..=1.0).contains(v)));

        let scale = |rows: &[Vec<u64>]| rows.iter().map(|r| r.iter().map(|v| v * k).collect()).collect::<Vec<Vec<u64>>>();
        let t2 = Tally::from_counts(&attrs, &scale(&base), &scale(&offered)).unwrap();
        let imp2 = importance_counts(&t2).unwrap();
        for (a, b) in imp1.fractions().iter().zip(imp2.fractions()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn partworth_importances_are_range_ratios(raw in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2..6), 2..5)) {
        let pw = PartWorths::centered(
            raw.iter()
                .enumerate()
                .map(|(i, u)| AttributePartWorths {
                    name: format!("a{i}"),
                    levels: (0..u.len()).map(|l| l as f64).collect(),
                    utilities: u.clone(),
                })
                .collect(),
        )
        .unwrap();
        let ranges: Vec<f64> = raw
            .iter()
            .map(|u| u.iter().cloned().fold(f64::MIN, f64::max) - u.iter().cloned().fold(f64::MAX, f64::min))
            .collect();
        let total: f64 = ranges.iter().sum();
        prop_assume!(total > 1e-9);
        let imp = importance_partworths(&pw).unwrap();
        for (got, r) in imp.fractions().iter().zip(&ranges) {
            prop_assert!((got - r / total).abs() < 1e-9);
        }
        prop_assert!((imp.fractions().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn half_fraction_is_level_balanced(counts in prop::collection::vec(1usize..4, 2..4)) {
        // even level counts guarantee every attribute has an even partner
        let attrs: Vec<Attribute> = counts
            .iter()
            .enumerate()
            .map(|(i, c)| Attribute::new(format!("a{i}"), (0..2 * c).map(|l| l as f64).collect(), None).unwrap())
            .collect();
        let half = half_fraction(&full_factorial(&attrs).unwrap()).unwrap();
        let lattice: usize = attrs.iter().map(|a| a.level_count()).product();
        prop_assert_eq!(half.len(), lattice / 2);
        for (k, a) in attrs.iter().enumerate() {
            let per_level: Vec<usize> = (0..a.level_count())
                .map(|l| half.iter().filter(|c| c.levels()[k] == l).count())
                .collect();
            prop_assert!(per_level.iter().all(|n| *n == per_level[0]), "{:?}", per_level);
        }
    }
}

#[test]
fn every_fit_is_effects_coded() {
    let design = survey_design(1);
    for seed in 0..4 {
        let choices = simulate_respondents(
            &presets::reference_part_worths(),
            &design,
            60,
            seed,
            Execution::Parallel,
        )
        .unwrap();
        let fit = fit_logit(&design, &choices, &FitConfig::default()).unwrap();
        for a in &fit.part_worths.attributes {
            assert!(a.utilities.iter().sum::<f64>().abs() < 1e-9, "{a:?}");
        }
    }
}
