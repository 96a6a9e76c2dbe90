//! Reference configurations: the three-attribute trust survey, its estimated
//! part-worths, and the worked annotation used throughout the docs and tests.

use crate::conjoint::{Attribute, AttributePartWorths, Dimension, PartWorths, Tally};
use crate::trust::{Annotation, Author, Edit, EditKind, Role};

pub const COMMENTS: &str = "Comments";
pub const READER_RATING: &str = "Reader Rating";
pub const AUTHOR_RATING: &str = "Author Rating";

fn attribute(name: &str, levels: &[f64], dimension: Dimension) -> Attribute {
    Attribute::new(name, levels.to_vec(), Some(dimension))
        .expect("preset levels are strictly increasing")
}

/// The three survey attributes with the levels shown to respondents.
pub fn survey_attributes() -> Vec<Attribute> {
    vec![
        attribute(COMMENTS, &[0.0, 2.0, 5.0, 10.0], Dimension::Stability),
        attribute(
            READER_RATING,
            &[0.0, 5.0, 30.0, 70.0],
            Dimension::Credibility,
        ),
        attribute(
            AUTHOR_RATING,
            &[-100.0, 0.0, 1000.0, 2000.0],
            Dimension::Quality,
        ),
    ]
}

/// Utilities estimated from the live survey, as reported to two decimals.
/// Author Rating sums to 0.01 at that precision.
pub const REPORTED_UTILITIES: [(&str, [f64; 4]); 3] = [
    (COMMENTS, [-0.67, -0.04, 0.24, 0.47]),
    (READER_RATING, [-0.82, -0.18, 0.29, 0.71]),
    (AUTHOR_RATING, [-0.90, -0.39, 0.44, 0.86]),
];

/// Importances reported alongside [`REPORTED_UTILITIES`], computed from the
/// unrounded utilities.
pub const REPORTED_IMPORTANCES: [(&str, f64); 3] = [
    (COMMENTS, 0.2435),
    (READER_RATING, 0.348),
    (AUTHOR_RATING, 0.4085),
];

/// [`REPORTED_UTILITIES`] re-centred to sum exactly to zero per attribute,
/// aligned with [`survey_attributes`].
pub fn reference_part_worths() -> PartWorths {
    let attributes = survey_attributes();
    PartWorths::centered(
        REPORTED_UTILITIES
            .iter()
            .zip(&attributes)
            .map(|((name, utilities), a)| AttributePartWorths {
                name: (*name).into(),
                levels: a.levels.clone(),
                utilities: utilities.to_vec(),
            })
            .collect(),
    )
    .expect("re-centred utilities are zero-sum")
}

/// Attributes of the count-based worked example. Its Reader Rating levels
/// differ from the survey's.
pub fn count_example_attributes() -> Vec<Attribute> {
    vec![
        attribute(COMMENTS, &[0.0, 2.0, 5.0, 10.0], Dimension::Stability),
        attribute(
            READER_RATING,
            &[0.0, 10.0, 30.0, 70.0],
            Dimension::Credibility,
        ),
        attribute(
            AUTHOR_RATING,
            &[-100.0, 0.0, 1000.0, 2000.0],
            Dimension::Quality,
        ),
    ]
}

/// Selection counts of the worked example (140 choices). Display frequencies
/// are published as percentages; they are expressed here as counts out of
/// 1000 displays per attribute.
pub fn count_example_tally() -> Tally {
    Tally::from_counts(
        &count_example_attributes(),
        &[vec![2, 33, 44, 61], vec![5, 24, 39, 72], vec![1, 7, 52, 80]],
        &[
            vec![50, 240, 310, 400],
            vec![40, 170, 280, 510],
            vec![50, 70, 370, 510],
        ],
    )
    .expect("worked counts are consistent")
}

/// The worked annotation: 50 unit edits (10 complex, 40 simple), edits IQ 30,
/// and three authors (editor, whitehat, staff) holding 70%, 28% and 2% of
/// the edits.
pub fn worked_example_annotation() -> Annotation {
    let authors = vec![
        author("editor-1", "editor", 10.0, 0.70, 2, 7),
        author("whitehat-1", "whitehat", 30.0, 0.28, 7, 30),
        author("staff-1", "staff", 120.0, 0.02, 1, 3),
    ];
    let mut edits = Vec::with_capacity(50);
    for a in &authors {
        let kinds = std::iter::repeat_n(EditKind::Complex, a.complex_edits as usize).chain(
            std::iter::repeat_n(EditKind::Simple, a.simple_edits as usize),
        );
        for kind in kinds {
            edits.push(Edit::new(edits.len() as i64 + 1, kind, a.id.clone()));
        }
    }
    Annotation {
        id: "worked-example".into(),
        created_at: 0,
        edits_iq: 30.0,
        edits,
        authors,
    }
}

fn author(
    id: &str,
    role: &str,
    iq: f64,
    attribution: f64,
    complex_edits: u64,
    simple_edits: u64,
) -> Author {
    Author {
        id: id.into(),
        role: Role::standard(role).expect("role is in the default table"),
        iq,
        attribution,
        complex_edits,
        simple_edits,
    }
}
