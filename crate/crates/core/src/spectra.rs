//! Schmidt spectra: sorted probability vectors and the elementary operations
//! on them (validation, entropy, tensor product).

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance, applied to prefix sums.
pub const DEFAULT_EQ_TOL: f64 = 1e-12;

/// Threshold below which two reals are treated as equal.
///
/// The tolerance should be well below the smallest spectral gap the caller
/// wants resolved; this is not checked.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Self = Self(DEFAULT_EQ_TOL);

    pub fn new(eq_tol: f64) -> Result<Self, SpectrumError> {
        if eq_tol.is_finite() && eq_tol >= 0.0 {
            Ok(Self(eq_tol))
        } else {
            Err(SpectrumError::InvalidTolerance(eq_tol))
        }
    }

    #[inline]
    pub fn eq_tol(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn eq(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(DEFAULT_EQ_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("empty spectrum")]
    Empty,
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("spectrum is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
}

/// Squared Schmidt coefficients of a bipartite pure state, sorted
/// non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SchmidtVector {
    values: Vec<f64>,
}

/// Summation slack for inputs whose entries were produced by floating-point
/// arithmetic.
fn rounding_slack(n: usize) -> f64 {
    4.0 * f64::EPSILON * n as f64
}

/// Validates `raw`, clamps negative dust to zero and sorts non-increasing.
///
/// The sort is stable, so equal entries keep their input order.
pub fn make_schmidt(raw: &[f64], tol: Tolerance) -> Result<SchmidtVector, SpectrumError> {
    if raw.is_empty() {
        return Err(SpectrumError::Empty);
    }
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(SpectrumError::NonFinite { index });
        }
        if value < -tol.eq_tol() {
            return Err(SpectrumError::NegativeEntry { index, value });
        }
    }
    let sum: f64 = raw.iter().sum();
    if (sum - 1.0).abs() > tol.eq_tol() + rounding_slack(raw.len()) {
        return Err(SpectrumError::NotNormalized { sum });
    }
    let mut values: Vec<f64> = raw.iter().map(|&v| v.max(0.0)).collect();
    sort_descending(&mut values);
    Ok(SchmidtVector { values })
}

pub(crate) fn sort_descending(values: &mut [f64]) {
    values.sort_by(|a, b| b.total_cmp(a));
}

impl SchmidtVector {
    /// Builds a vector from entries that are already valid up to rounding.
    /// Entries are clamped and re-sorted but normalization is not checked.
    pub(crate) fn from_raw_unchecked(mut values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        for v in values.iter_mut() {
            *v = v.max(0.0);
        }
        sort_descending(&mut values);
        Self { values }
    }

    /// The uniform (maximally entangled) spectrum of dimension `n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        Self {
            values: vec![1.0 / n as f64; n],
        }
    }

    /// The two-level spectrum `(p, 1 - p)` for `p` in `[1/2, 1]`.
    pub fn qubit(p: f64) -> Self {
        Self::from_raw_unchecked(vec![p, 1.0 - p])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Appends `extra` zero entries.
    pub fn padded(&self, extra: usize) -> Self {
        let mut values = self.values.clone();
        values.extend(std::iter::repeat_n(0.0, extra));
        Self { values }
    }

    pub fn is_uniform(&self, tol: Tolerance) -> bool {
        let u = 1.0 / self.dim() as f64;
        self.values.iter().all(|&v| tol.eq(v, u))
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }
}

impl Deref for SchmidtVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl<'de> Deserialize<'de> for SchmidtVector {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = Vec::<f64>::deserialize(deserializer)?;
        make_schmidt(&raw, Tolerance::default()).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for SchmidtVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Entropy of entanglement in nats, with `0 ln 0 = 0`.
pub fn entropy(v: &SchmidtVector) -> f64 {
    shannon_nats(v.values())
}

pub(crate) fn shannon_nats(values: &[f64]) -> f64 {
    -values
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Spectrum of the product state: all pairwise products, sorted.
pub fn tensor_spectrum(a: &SchmidtVector, b: &SchmidtVector) -> SchmidtVector {
    let mut values = Vec::with_capacity(a.dim() * b.dim());
    tensor_into(a.values(), b.values(), &mut values);
    SchmidtVector { values }
}

/// Writes the sorted product spectrum of `a` and `b` into `out`, reusing its
/// allocation.
pub(crate) fn tensor_into(a: &[f64], b: &[f64], out: &mut Vec<f64>) {
    out.clear();
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    sort_descending(out);
}
