//! The worked annotation and the worked count tally, checked against values
//! computed by hand from their inputs.

use trustcbc::conjoint::{importance_counts, utility_counts, utility_levels};
use trustcbc::presets::{
    self, count_example_attributes, count_example_tally, worked_example_annotation,
};
use trustcbc::trust::*;

// Hand arithmetic, independent of the library code paths.
const HAND_UCCF: f64 =
    0.70 * (25.0 * 0.025 * 10.0) + 0.28 * (3.0 * 0.025 * 30.0) + 0.02 * (38.0 * 0.025 * 120.0);
const HAND_EDITS_TYPES: f64 = 30.0 * 10.0 / 40.0;
const HAND_UCCF_TOP2: f64 = 0.70 * (25.0 * 0.025 * 10.0) + 0.28 * (3.0 * 0.025 * 30.0);
const HAND_EDITS_TYPES_TOP2: f64 = 30.0 * 9.0 / 37.0;

#[test]
fn dimensions_of_the_worked_annotation() {
    let a = worked_example_annotation();
    assert_eq!(stability(&a, a.created_at, a.last_activity()).unwrap(), 50);
    assert!((uccf(&a.authors).unwrap() - 7.285).abs() < 1e-3);
    assert!((uccf(&a.authors).unwrap() - HAND_UCCF).abs() < 1e-12);
    assert!((credibility(&a).unwrap() - 7.392).abs() < 1e-3);
    assert!((quality(&a, 2).unwrap() - 6.151).abs() < 1e-3);
    assert!(
        (quality(&a, 2).unwrap() - (HAND_UCCF_TOP2 + HAND_EDITS_TYPES_TOP2) / 2.0).abs() < 1e-12
    );
    // n covering every author degenerates to credibility
    assert!((quality(&a, 3).unwrap() - 7.392).abs() < 1e-3);
    assert_eq!(quality(&a, 3).unwrap(), credibility(&a).unwrap());
}

#[test]
fn trust_with_illustrative_and_default_weights() {
    let a = worked_example_annotation();
    let (t0, p) = (a.created_at, a.last_activity());
    let illustrative = trust(&a, &TrustWeights::ILLUSTRATIVE, 2, t0, p).unwrap();
    assert!((illustrative - 19.338).abs() < 0.01, "{illustrative}");
    assert_eq!(
        translate_trust(illustrative, &TranslatorThresholds::default()).unwrap(),
        TrustDegree::VeryTrusted
    );

    let expected = 0.2435 * 50.0
        + 0.348 * (HAND_UCCF + HAND_EDITS_TYPES) / 2.0
        + 0.4085 * (HAND_UCCF_TOP2 + HAND_EDITS_TYPES_TOP2) / 2.0;
    let default = trust(&a, &TrustWeights::default(), 2, t0, p).unwrap();
    assert!(
        (default - expected).abs() < 1e-12,
        "{default} vs {expected}"
    );

    let s = score(&a, &ScoreParams::default()).unwrap();
    assert_eq!(s.stability, 50);
    assert!((s.trust - expected).abs() < 1e-12);
    assert!((s.quality.uccf - 5.005).abs() < 1e-3);
    assert!((s.quality.edits_types - 7.297).abs() < 1e-3);
}

#[test]
fn two_author_credibility() {
    // UCCF = 0.6·(25·0.025·40) + 0.4·(3·0.025·200) = 15 + 6 = 21
    // editsTypes = 12 · 4 / 8 = 6; credibility = 13.5
    let authors = vec![
        Author {
            id: "a".into(),
            role: Role::standard("editor").unwrap(),
            iq: 40.0,
            attribution: 0.6,
            complex_edits: 3,
            simple_edits: 5,
        },
        Author {
            id: "b".into(),
            role: Role::standard("whitehat").unwrap(),
            iq: 200.0,
            attribution: 0.4,
            complex_edits: 1,
            simple_edits: 3,
        },
    ];
    let edits = (0..12)
        .map(|t| Edit::new(t, EditKind::Simple, if t < 8 { "a" } else { "b" }))
        .collect();
    let a = Annotation {
        id: "pair".into(),
        created_at: 0,
        edits_iq: 12.0,
        edits,
        authors,
    };
    a.validate().unwrap();
    assert!((credibility(&a).unwrap() - 13.5).abs() < 1e-12);
}

#[test]
fn worked_count_tally() {
    let t = count_example_tally();
    let imp = importance_counts(&t).unwrap();
    // ranges 59, 67, 79 over 205
    assert!((imp.get(presets::COMMENTS).unwrap() - 59.0 / 205.0).abs() < 1e-12);
    assert!((imp.get(presets::READER_RATING).unwrap() - 67.0 / 205.0).abs() < 1e-12);
    assert!((imp.get(presets::AUTHOR_RATING).unwrap() - 79.0 / 205.0).abs() < 1e-12);
    assert!((imp.get(presets::COMMENTS).unwrap() - 0.29).abs() < 0.01);

    let u = utility_counts(&t).unwrap();
    assert_eq!(u[0], vec![0.0, 31.0, 42.0, 59.0]);
    assert_eq!(u[1], vec![0.0, 19.0, 34.0, 67.0]);

    let level_utils: Vec<Vec<f64>> = count_example_attributes()
        .iter()
        .map(|a| utility_levels(&a.levels))
        .collect();
    assert_eq!(
        level_utils,
        vec![
            vec![0.0, 2.0, 5.0, 10.0],
            vec![0.0, 10.0, 30.0, 70.0],
            vec![0.0, 100.0, 1100.0, 2100.0]
        ]
    );
}
