//! Soft real numbers over a finite parameter set.
//!
//! A soft real is a dense vector with one finite entry per parameter label.
//! The order is the pointwise partial order: `r <= s` iff every component
//! satisfies it, and the strict forms require strictness in every component,
//! so two soft reals can be incomparable.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SoftError};

/// Ordered parameter labels, optionally carrying numeric values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    labels: Vec<String>,
    values: Option<Vec<f64>>,
}

impl ParamSet {
    pub fn new(labels: Vec<String>, values: Option<Vec<f64>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(SoftError::Domain("parameter set must be non-empty".into()));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(SoftError::Domain(format!(
                    "duplicate parameter label `{label}`"
                )));
            }
        }
        if let Some(values) = &values {
            if values.len() != labels.len() {
                return Err(SoftError::DimensionMismatch {
                    expected: labels.len(),
                    found: values.len(),
                });
            }
            if let Some((component, &value)) =
                values.iter().enumerate().find(|(_, v)| !v.is_finite())
            {
                return Err(SoftError::NonFinite { component, value });
            }
        }
        Ok(ParamSet { labels, values })
    }

    /// Labels without numeric values.
    pub fn labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(labels.into_iter().map(Into::into).collect(), None)
    }

    /// Numeric labels, each named by its value's display form.
    pub fn numeric(values: &[f64]) -> Result<Self> {
        let labels = values.iter().map(|v| format!("{v}")).collect();
        Self::new(labels, Some(values.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn label_names(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| SoftError::UnknownLabel(label.to_string()))
    }

    pub fn is_numeric(&self) -> bool {
        self.values.is_some()
    }

    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    pub fn value(&self, index: usize) -> Option<f64> {
        self.values.as_ref().map(|v| v[index])
    }

    /// Index of the label whose numeric value is exactly `value`.
    pub fn index_of_value(&self, value: f64) -> Option<usize> {
        self.values.as_ref()?.iter().position(|&v| v == value)
    }
}

/// Result of comparing two soft reals under the pointwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SoftOrdering {
    pub le: bool,
    pub ge: bool,
    pub lt: bool,
    pub gt: bool,
    pub eq: bool,
    pub incomparable: bool,
}

/// A parameter-indexed vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SoftReal {
    entries: Vec<f64>,
}

impl SoftReal {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some((component, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite())
        {
            return Err(SoftError::NonFinite { component, value });
        }
        Ok(SoftReal { entries })
    }

    /// The constant soft real with `len` components equal to `value`.
    pub fn constant(len: usize, value: f64) -> Self {
        assert!(value.is_finite(), "soft real entries must be finite");
        SoftReal {
            entries: vec![value; len],
        }
    }

    pub fn zero(len: usize) -> Self {
        Self::constant(len, 0.0)
    }

    pub fn one(len: usize) -> Self {
        Self::constant(len, 1.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, component: usize) -> f64 {
        self.entries[component]
    }

    /// Largest component.
    pub fn sup(&self) -> f64 {
        self.entries
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest component.
    pub fn inf(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    pub fn is_zero_within(&self, eta: f64) -> bool {
        self.entries.iter().all(|&v| v.abs() <= eta)
    }

    /// Strictly positive in every component.
    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|&v| v > 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] == w[1])
    }

    fn check_len(&self, other: &SoftReal) -> Result<()> {
        if self.len() != other.len() {
            return Err(SoftError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    /// Pointwise comparison. Strict verdicts require a gap larger than
    /// `margin` in every component; the non-strict ones are exact.
    pub fn compare(&self, other: &SoftReal, margin: f64) -> Result<SoftOrdering> {
        self.check_len(other)?;
        let pairs = || self.entries.iter().zip(&other.entries);
        let le = pairs().all(|(r, s)| r <= s);
        let ge = pairs().all(|(r, s)| r >= s);
        Ok(SoftOrdering {
            le,
            ge,
            lt: pairs().all(|(r, s)| *r < *s - margin),
            gt: pairs().all(|(r, s)| *r > *s + margin),
            eq: le && ge,
            incomparable: !le && !ge,
        })
    }

    /// `self <= other + eta` in every component.
    pub fn le_within(&self, other: &SoftReal, eta: f64) -> Result<bool> {
        self.check_len(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .all(|(r, s)| *r <= *s + eta))
    }

    /// `self < other` in every component.
    pub fn lt(&self, other: &SoftReal) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.entries.iter().zip(&other.entries).all(|(r, s)| r < s))
    }

    fn zip_with(&self, other: &SoftReal, op: impl Fn(f64, f64) -> f64) -> Result<SoftReal> {
        self.check_len(other)?;
        SoftReal::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&r, &s)| op(r, s))
                .collect(),
        )
    }

    pub fn add(&self, other: &SoftReal) -> Result<SoftReal> {
        self.zip_with(other, |r, s| r + s)
    }

    pub fn sub(&self, other: &SoftReal) -> Result<SoftReal> {
        self.zip_with(other, |r, s| r - s)
    }

    pub fn mul(&self, other: &SoftReal) -> Result<SoftReal> {
        self.zip_with(other, |r, s| r * s)
    }

    pub fn div(&self, other: &SoftReal) -> Result<SoftReal> {
        self.check_len(other)?;
        if let Some(component) = other.entries.iter().position(|&s| s == 0.0) {
            return Err(SoftError::ZeroDivisor { component });
        }
        self.zip_with(other, |r, s| r / s)
    }

    pub fn scale(&self, factor: f64) -> Result<SoftReal> {
        SoftReal::new(self.entries.iter().map(|&r| factor * r).collect())
    }

    /// Componentwise maximum.
    pub fn max(&self, other: &SoftReal) -> Result<SoftReal> {
        self.zip_with(other, f64::max)
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &SoftReal) -> Result<SoftReal> {
        self.zip_with(other, f64::min)
    }
}

impl fmt::Display for SoftReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let precision = f.precision().unwrap_or(12);
        write!(f, "(")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:.precision$}")?;
        }
        write!(f, ")")
    }
}

/// Majorant `alpha^m / (1 - alpha) * base` of the Picard tail, componentwise.
///
/// Every component of `alpha` must lie in `[0, 1)` and `base` must be
/// non-negative.
pub fn geometric_tail_bound(alpha: &SoftReal, m: usize, base: &SoftReal) -> Result<SoftReal> {
    alpha.check_len(base)?;
    for (component, &a) in alpha.entries.iter().enumerate() {
        if !(0.0..1.0).contains(&a) {
            return Err(SoftError::Infeasible(format!(
                "rate component {component} is {a}, outside [0, 1)"
            )));
        }
    }
    if let Some(component) = base.entries.iter().position(|&b| b < 0.0) {
        return Err(SoftError::Domain(format!(
            "negative base component {component}"
        )));
    }
    let exponent = i32::try_from(m).unwrap_or(i32::MAX);
    SoftReal::new(
        alpha
            .entries
            .iter()
            .zip(&base.entries)
            .map(|(&a, &b)| {
                if b == 0.0 {
                    0.0
                } else {
                    a.powi(exponent) / (1.0 - a) * b
                }
            })
            .collect(),
    )
}
