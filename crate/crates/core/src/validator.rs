//! Accept/reject verdicts for a black-box fingerprint against reference
//! fingerprints.
//!
//! The protocol only ever rejects. A `consistent` decision means the data
//! could not be told apart from that hypothesis at the chosen threshold; it is
//! never evidence that the black box is a correct boson sampler.

use std::fmt;

use crate::error::{Error, Result};
use crate::filling::{FitFingerprint, Param};

/// One-sigma ellipsoid disjointness.
pub const DEFAULT_THRESHOLD: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub label: String,
    pub fingerprint: FitFingerprint,
}

impl Hypothesis {
    pub fn new(fingerprint: FitFingerprint) -> Self {
        Hypothesis { label: fingerprint.label.clone(), fingerprint }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Consistent,
    Rejected,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Consistent => "consistent",
            Decision::Rejected => "rejected",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimensionality {
    ThreeParam,
    TwoParam,
}

impl Dimensionality {
    pub fn params(self) -> &'static [Param] {
        match self {
            Dimensionality::ThreeParam => &Param::ALL,
            Dimensionality::TwoParam => &[Param::AlphaMu, Param::BetaSigma],
        }
    }
}

impl fmt::Display for Dimensionality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimensionality::ThreeParam => "3-param",
            Dimensionality::TwoParam => "2-param",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerdictRow {
    pub label: String,
    pub separation: f64,
    pub decision: Decision,
    pub dimensionality: Dimensionality,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub threshold: f64,
    pub radius: u32,
    pub modes: usize,
    pub photons: u32,
    pub rows: Vec<VerdictRow>,
}

impl Verdict {
    pub fn row(&self, label: &str) -> Option<&VerdictRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn rejected(&self) -> impl Iterator<Item = &VerdictRow> {
        self.rows.iter().filter(|r| r.decision == Decision::Rejected)
    }
}

fn check_metadata(a: &FitFingerprint, b: &FitFingerprint) -> Result<()> {
    if a.radius != b.radius {
        return Err(Error::MetadataMismatch(format!("radius {} vs {}", a.radius, b.radius)));
    }
    if (a.modes, a.photons) != (b.modes, b.photons) {
        return Err(Error::MetadataMismatch(format!(
            "(m, n) = ({}, {}) vs ({}, {})",
            a.modes, a.photons, b.modes, b.photons
        )));
    }
    Ok(())
}

/// `sqrt(sum_p (a_p - b_p)^2 / (err_a_p^2 + err_b_p^2))` over `dims`.
///
/// A parameter with zero combined error contributes nothing when the values
/// agree and makes the separation infinite otherwise.
pub fn separation(a: &FitFingerprint, b: &FitFingerprint, dims: &[Param]) -> Result<f64> {
    check_metadata(a, b)?;
    if dims.is_empty() {
        return Err(Error::InvalidArgument("separation needs at least one parameter".into()));
    }
    let sum: f64 = dims
        .iter()
        .map(|&p| {
            let diff = a.value(p) - b.value(p);
            let var = a.error(p).powi(2) + b.error(p).powi(2);
            if diff == 0.0 {
                0.0
            } else if var == 0.0 {
                f64::INFINITY
            } else {
                diff * diff / var
            }
        })
        .sum();
    Ok(sum.sqrt())
}

/// Drops `alpha_sigma` when it vanishes within errors for both fingerprints.
pub fn dimensionality(a: &FitFingerprint, b: &FitFingerprint) -> Dimensionality {
    if a.alpha_sigma_vanishes() && b.alpha_sigma_vanishes() {
        Dimensionality::TwoParam
    } else {
        Dimensionality::ThreeParam
    }
}

/// Separation over the automatically chosen parameter set.
pub fn auto_separation(a: &FitFingerprint, b: &FitFingerprint) -> Result<(f64, Dimensionality)> {
    let dims = dimensionality(a, b);
    Ok((separation(a, b, dims.params())?, dims))
}

pub fn validate(blackbox: &FitFingerprint, hypotheses: &[Hypothesis], threshold: f64) -> Result<Verdict> {
    if hypotheses.is_empty() {
        return Err(Error::InvalidArgument("validation needs at least one hypothesis".into()));
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {threshold}")));
    }
    let rows = hypotheses
        .iter()
        .map(|h| {
            let (separation, dimensionality) = auto_separation(blackbox, &h.fingerprint)?;
            let decision = if separation > threshold { Decision::Rejected } else { Decision::Consistent };
            Ok(VerdictRow { label: h.label.clone(), separation, decision, dimensionality })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Verdict { threshold, radius: blackbox.radius, modes: blackbox.modes, photons: blackbox.photons, rows })
}
