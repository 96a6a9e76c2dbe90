use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::model::{check_attribution_sum, Annotation, Author, TrustWeights};
use super::translate::{translate_trust, TranslatorThresholds, TrustDegree};
use super::TrustError;
use crate::exec::{map_slice, Execution};

/// Signed number of edits recorded exactly at time stamp `t`.
pub fn edits_at(annotation: &Annotation, t: i64) -> i64 {
    annotation
        .edits
        .iter()
        .filter(|e| e.timestamp == t)
        .map(|e| e.weight)
        .sum()
}

/// Sum of the edit function over the closed window `[start, end]`.
pub fn stability(annotation: &Annotation, start: i64, end: i64) -> Result<i64, TrustError> {
    if start > end {
        return Err(TrustError::InvalidInterval { start, end });
    }
    Ok(annotation
        .edits
        .iter()
        .filter(|e| (start..=end).contains(&e.timestamp))
        .map(|e| e.weight)
        .sum())
}

/// `rank × roleFactor × IQ`.
pub fn role_power(author: &Author) -> f64 {
    author.role.rank * author.role.role_factor * author.iq
}

/// User credibility correction factor: attribution-weighted role power.
///
/// The attributions of `authors` must sum to one.
pub fn uccf(authors: &[Author]) -> Result<f64, TrustError> {
    check_attribution_sum(authors)?;
    Ok(weighted_role_power(authors.iter()))
}

fn weighted_role_power<'a>(authors: impl Iterator<Item = &'a Author>) -> f64 {
    authors.map(|a| a.attribution * role_power(a)).sum()
}

/// Edit-type ratio `editsIQ × CE / SE`. A zero simple-edit count is treated as
/// one so annotations with only complex edits stay scorable.
pub fn edits_types(
    edits_iq: f64,
    complex_edits: u64,
    simple_edits: u64,
) -> Result<f64, TrustError> {
    if complex_edits + simple_edits == 0 {
        return Err(TrustError::NoEdits);
    }
    Ok(edits_iq * complex_edits as f64 / simple_edits.max(1) as f64)
}

/// The two averaged terms of a credibility-style dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DimensionTerms {
    pub uccf: f64,
    pub edits_types: f64,
    pub value: f64,
}

impl DimensionTerms {
    fn from_terms(uccf: f64, edits_types: f64) -> Self {
        Self {
            uccf,
            edits_types,
            value: (uccf + edits_types) / 2.0,
        }
    }
}

fn pooled_edit_counts<'a>(authors: impl Iterator<Item = &'a Author>) -> (u64, u64) {
    authors.fold((0, 0), |(ce, se), a| {
        (ce + a.complex_edits, se + a.simple_edits)
    })
}

fn credibility_terms(annotation: &Annotation) -> Result<DimensionTerms, TrustError> {
    if annotation.authors.is_empty() {
        return Err(TrustError::NoAuthors);
    }
    let u = uccf(&annotation.authors)?;
    let (ce, se) = pooled_edit_counts(annotation.authors.iter());
    Ok(DimensionTerms::from_terms(
        u,
        edits_types(annotation.edits_iq, ce, se)?,
    ))
}

/// `(UCCF + editsTypes) / 2` over all authors.
pub fn credibility(annotation: &Annotation) -> Result<f64, TrustError> {
    credibility_terms(annotation).map(|t| t.value)
}

/// Orders authors by descending attribution, then descending IQ, then id.
fn by_activity(a: &Author, b: &Author) -> Ordering {
    b.attribution
        .total_cmp(&a.attribution)
        .then_with(|| b.iq.total_cmp(&a.iq))
        .then_with(|| a.id.cmp(&b.id))
}

fn quality_terms(annotation: &Annotation, top_n: usize) -> Result<DimensionTerms, TrustError> {
    if top_n < 1 {
        return Err(TrustError::InvalidTopN(top_n));
    }
    if top_n >= annotation.authors.len() {
        return credibility_terms(annotation);
    }
    // attribution sum is checked on the full set; excluded terms are dropped
    // without renormalising the remaining shares
    check_attribution_sum(&annotation.authors)?;
    let mut ranked: Vec<&Author> = annotation.authors.iter().collect();
    ranked.sort_by(|a, b| by_activity(a, b));
    let top = &ranked[..top_n];
    let u = weighted_role_power(top.iter().copied());
    let (ce, se) = pooled_edit_counts(top.iter().copied());
    Ok(DimensionTerms::from_terms(
        u,
        edits_types(annotation.edits_iq, ce, se)?,
    ))
}

/// Credibility restricted to the `top_n` authors with the highest attribution.
pub fn quality(annotation: &Annotation, top_n: usize) -> Result<f64, TrustError> {
    quality_terms(annotation, top_n).map(|t| t.value)
}

/// `α × stability + β × credibility + γ × quality` over `[start, end]`.
pub fn trust(
    annotation: &Annotation,
    weights: &TrustWeights,
    top_n: usize,
    start: i64,
    end: i64,
) -> Result<f64, TrustError> {
    weights.validate()?;
    let s = stability(annotation, start, end)?;
    let c = credibility(annotation)?;
    let q = quality(annotation, top_n)?;
    Ok(weights.alpha * s as f64 + weights.beta * c + weights.gamma * q)
}

/// Parameters for scoring annotations end to end.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreParams {
    pub weights: TrustWeights,
    pub top_n: usize,
    pub thresholds: TranslatorThresholds,
    /// Observation end; `None` uses each annotation's latest edit.
    pub until: Option<i64>,
}

impl Default for ScoreParams {
    fn default() -> Self {
        Self {
            weights: TrustWeights::default(),
            top_n: 2,
            thresholds: TranslatorThresholds::default(),
            until: None,
        }
    }
}

/// Full breakdown of one annotation's trust.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrustScore {
    pub id: String,
    pub stability: i64,
    pub credibility: DimensionTerms,
    pub quality: DimensionTerms,
    pub trust: f64,
    pub degree: TrustDegree,
}

/// Scores one annotation over `[createdAt, until]`.
pub fn score(annotation: &Annotation, params: &ScoreParams) -> Result<TrustScore, TrustError> {
    params.weights.validate()?;
    params.thresholds.validate()?;
    let end = params.until.unwrap_or_else(|| annotation.last_activity());
    let stability = stability(annotation, annotation.created_at, end)?;
    let credibility = credibility_terms(annotation)?;
    let quality = quality_terms(annotation, params.top_n)?;
    let w = &params.weights;
    let trust = w.alpha * stability as f64 + w.beta * credibility.value + w.gamma * quality.value;
    Ok(TrustScore {
        id: annotation.id.clone(),
        stability,
        credibility,
        quality,
        trust,
        degree: translate_trust(trust, &params.thresholds)?,
    })
}

/// Scores a batch of annotations, in input order.
pub fn score_all(
    annotations: &[Annotation],
    params: &ScoreParams,
    exec: Execution,
) -> Vec<Result<TrustScore, TrustError>> {
    map_slice(exec, annotations, |a| score(a, params))
}
