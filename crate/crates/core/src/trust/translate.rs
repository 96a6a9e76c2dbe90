use std::fmt;

use serde::{Deserialize, Serialize};

use super::TrustError;

/// Discrete trust class. Ordered from least to most trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrustDegree {
    VeryUntrusted,
    Untrusted,
    Trusted,
    VeryTrusted,
}

impl TrustDegree {
    /// All degrees, least trusted first.
    pub const ASCENDING: [TrustDegree; 4] = [
        TrustDegree::VeryUntrusted,
        TrustDegree::Untrusted,
        TrustDegree::Trusted,
        TrustDegree::VeryTrusted,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TrustDegree::VeryTrusted => "vt",
            TrustDegree::Trusted => "t",
            TrustDegree::Untrusted => "u",
            TrustDegree::VeryUntrusted => "vu",
        }
    }
}

impl fmt::Display for TrustDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrustDegree::VeryTrusted => "very trusted",
            TrustDegree::Trusted => "trusted",
            TrustDegree::Untrusted => "untrusted",
            TrustDegree::VeryUntrusted => "very untrusted",
        })
    }
}

/// Lower cut points of the three upper trust degrees on the composite value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TranslatorThresholds {
    pub very_trusted: f64,
    pub trusted: f64,
    pub untrusted: f64,
}

impl TranslatorThresholds {
    pub fn new(very_trusted: f64, trusted: f64, untrusted: f64) -> Result<Self, TrustError> {
        let t = Self {
            very_trusted,
            trusted,
            untrusted,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TrustError> {
        let cuts = [self.very_trusted, self.trusted, self.untrusted];
        if cuts.iter().any(|c| !c.is_finite()) {
            return Err(TrustError::InvalidThresholds(format!(
                "cuts must be finite, got {cuts:?}"
            )));
        }
        if !(self.very_trusted > self.trusted && self.trusted > self.untrusted) {
            return Err(TrustError::InvalidThresholds(format!(
                "cuts must be strictly decreasing, got {cuts:?}"
            )));
        }
        Ok(())
    }
}

impl Default for TranslatorThresholds {
    fn default() -> Self {
        Self {
            very_trusted: 15.0,
            trusted: 13.5,
            untrusted: 12.0,
        }
    }
}

/// Maps a trust value to its degree. Each cut belongs to the class above it.
pub fn translate_trust(
    value: f64,
    thresholds: &TranslatorThresholds,
) -> Result<TrustDegree, TrustError> {
    thresholds.validate()?;
    Ok(if value >= thresholds.very_trusted {
        TrustDegree::VeryTrusted
    } else if value >= thresholds.trusted {
        TrustDegree::Trusted
    } else if value >= thresholds.untrusted {
        TrustDegree::Untrusted
    } else {
        TrustDegree::VeryUntrusted
    })
}

/// Half-open interval `[lower, upper)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

impl Band {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lower && value < self.upper
    }
}

/// Per-metric degree bands, indexed like [`TrustDegree::ASCENDING`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBands {
    pub edits_number: [Band; 4],
    pub edits_iq: [Band; 4],
    pub user_iq: [Band; 4],
}

const NEG_INF: f64 = f64::NEG_INFINITY;
const INF: f64 = f64::INFINITY;

impl Default for MetricBands {
    /// The observed platform bands; shared boundaries go to the higher class.
    fn default() -> Self {
        Self {
            edits_number: [
                Band::new(NEG_INF, 0.0),
                Band::new(0.0, 2.0),
                Band::new(2.0, 5.0),
                Band::new(5.0, INF),
            ],
            edits_iq: [
                Band::new(NEG_INF, 0.0),
                Band::new(0.0, 5.0),
                Band::new(5.0, 35.0),
                Band::new(35.0, INF),
            ],
            user_iq: [
                Band::new(NEG_INF, -100.0),
                Band::new(-100.0, 0.0),
                Band::new(0.0, 1000.0),
                Band::new(1000.0, INF),
            ],
        }
    }
}

impl MetricBands {
    fn metrics(&self) -> [(&'static str, &[Band; 4]); 3] {
        [
            ("editsNumber", &self.edits_number),
            ("editsIQ", &self.edits_iq),
            ("userIQ", &self.user_iq),
        ]
    }

    pub fn validate(&self) -> Result<(), TrustError> {
        for (name, bands) in self.metrics() {
            for band in bands {
                if band.lower.is_nan() || band.upper.is_nan() || band.lower >= band.upper {
                    return Err(TrustError::InvalidBands(format!(
                        "{name}: empty or NaN band {band:?}"
                    )));
                }
            }
            for pair in bands.windows(2) {
                if pair[0].upper > pair[1].lower {
                    return Err(TrustError::InvalidBands(format!(
                        "{name}: bands {:?} and {:?} overlap or are out of order",
                        pair[0], pair[1]
                    )));
                }
            }
        }
        Ok(())
    }
}

fn degree_in(
    metric: &'static str,
    bands: &[Band; 4],
    value: f64,
) -> Result<TrustDegree, TrustError> {
    bands
        .iter()
        .position(|b| b.contains(value))
        .map(|i| TrustDegree::ASCENDING[i])
        .ok_or(TrustError::BandCoverage { metric, value })
}

/// Per-metric degrees and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricClassification {
    pub edits_number: TrustDegree,
    pub edits_iq: TrustDegree,
    pub user_iq: TrustDegree,
    pub combined: TrustDegree,
}

/// Classifies each metric against its bands and combines the three degrees.
///
/// The combined degree is the median: the majority degree when two or more
/// metrics agree, otherwise the middle of three distinct degrees.
pub fn classify_metrics(
    edits_number: f64,
    edits_iq: f64,
    user_iq: f64,
    bands: &MetricBands,
) -> Result<MetricClassification, TrustError> {
    bands.validate()?;
    let n = degree_in("editsNumber", &bands.edits_number, edits_number)?;
    let e = degree_in("editsIQ", &bands.edits_iq, edits_iq)?;
    let u = degree_in("userIQ", &bands.user_iq, user_iq)?;
    let mut sorted = [n, e, u];
    sorted.sort();
    Ok(MetricClassification {
        edits_number: n,
        edits_iq: e,
        user_iq: u,
        combined: sorted[1],
    })
}

/// Target population share of each trust degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassShares {
    pub very_trusted: f64,
    pub trusted: f64,
    pub untrusted: f64,
    pub very_untrusted: f64,
}

impl Default for ClassShares {
    /// Shares observed on the platform data set.
    fn default() -> Self {
        Self {
            very_trusted: 0.25,
            trusted: 0.3125,
            untrusted: 0.0625,
            very_untrusted: 0.375,
        }
    }
}

impl ClassShares {
    pub fn validate(&self) -> Result<(), TrustError> {
        let parts = [
            self.very_trusted,
            self.trusted,
            self.untrusted,
            self.very_untrusted,
        ];
        let sum: f64 = parts.iter().sum();
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > 1e-9 {
            return Err(TrustError::InvalidShares(sum));
        }
        Ok(())
    }
}

/// Inverse of the linearly interpolated ECDF at probability `p`: position
/// `h = n·p` (1-based) interpolated between neighbouring order statistics.
fn ecdf_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = n as f64 * p;
    if h <= 1.0 {
        return sorted[0];
    }
    if h >= n as f64 {
        return sorted[n - 1];
    }
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1])
}

/// Places the translator cuts at the empirical quantiles that reproduce
/// `shares` on `values`.
pub fn derive_thresholds_ecdf(
    values: &[f64],
    shares: &ClassShares,
) -> Result<TranslatorThresholds, TrustError> {
    if values.is_empty() {
        return Err(TrustError::EmptyData);
    }
    shares.validate()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(TrustError::DegenerateData("values must be finite".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let below_untrusted = shares.very_untrusted;
    let below_trusted = below_untrusted + shares.untrusted;
    let below_very_trusted = below_trusted + shares.trusted;
    let thresholds = TranslatorThresholds {
        very_trusted: ecdf_quantile(&sorted, below_very_trusted),
        trusted: ecdf_quantile(&sorted, below_trusted),
        untrusted: ecdf_quantile(&sorted, below_untrusted),
    };
    thresholds.validate().map_err(|_| {
        TrustError::DegenerateData(format!(
            "derived cuts are not strictly decreasing: {thresholds:?}"
        ))
    })?;
    Ok(thresholds)
}
