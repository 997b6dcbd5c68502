//! The majorization order on Schmidt spectra and the equality structure of
//! a comparable pair.
//!
//! `majorize(a, b)` decides `a ≺ b`: every prefix sum of `a` is at most the
//! matching prefix sum of `b`. For spectra of pure states this is exactly the
//! condition for `a`'s state to be convertible into `b`'s with certainty by
//! local operations and classical communication.
//!
//! Prefix lengths `m` are reported 1-based (`m = 1..n-1`); the trivial
//! `m = n` comparison (both sides equal one) is never part of the equality
//! set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectra::{SchmidtVector, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dimension mismatch: {left} vs {right}")]
pub struct DimensionMismatch {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub holds: bool,
    /// Smallest prefix length `m` with `sum_a(m) > sum_b(m) + tol`.
    pub first_violation: Option<usize>,
    /// Prefix lengths with equal sums. Empty when `holds` is false.
    pub equality_indices: Vec<usize>,
    pub strict_all: bool,
    /// Length of the longest run of consecutive members of the equality set.
    pub eta: usize,
}

impl MajorizationReport {
    pub fn delta(&self) -> &[usize] {
        &self.equality_indices
    }
}

/// Running sums of the entries.
pub fn prefix_sums(v: &SchmidtVector) -> Vec<f64> {
    prefix_sums_of(v.values())
}

pub(crate) fn prefix_sums_of(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Longest run of consecutive integers in a sorted index set.
pub fn longest_run(indices: &[usize]) -> usize {
    let mut best = 0;
    let mut run = 0;
    let mut prev: Option<usize> = None;
    for &i in indices {
        run = match prev {
            Some(p) if i == p + 1 => run + 1,
            _ => 1,
        };
        best = best.max(run);
        prev = Some(i);
    }
    best
}

/// Decides whether `a ≺ b`.
pub fn majorize(
    a: &SchmidtVector,
    b: &SchmidtVector,
    tol: Tolerance,
) -> Result<MajorizationReport, DimensionMismatch> {
    if a.dim() != b.dim() {
        return Err(DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(majorize_slices(a.values(), b.values(), tol))
}

/// Same as [`majorize`] on raw sorted slices of equal length.
pub(crate) fn majorize_slices(a: &[f64], b: &[f64], tol: Tolerance) -> MajorizationReport {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let eps = tol.eq_tol();
    let mut sa = 0.0;
    let mut sb = 0.0;
    let mut delta = Vec::new();
    for m in 1..n {
        sa += a[m - 1];
        sb += b[m - 1];
        let diff = sa - sb;
        if diff > eps {
            return MajorizationReport {
                holds: false,
                first_violation: Some(m),
                equality_indices: Vec::new(),
                strict_all: false,
                eta: 0,
            };
        }
        if diff.abs() <= eps {
            delta.push(m);
        }
    }
    let eta = longest_run(&delta);
    MajorizationReport {
        holds: true,
        first_violation: None,
        strict_all: delta.is_empty(),
        equality_indices: delta,
        eta,
    }
}

/// Fast yes/no form of [`majorize_slices`].
pub(crate) fn majorizes_slices(a: &[f64], b: &[f64], tol: Tolerance) -> bool {
    let eps = tol.eq_tol();
    let mut sa = 0.0;
    let mut sb = 0.0;
    for (x, y) in a.iter().zip(b).take(a.len().saturating_sub(1)) {
        sa += x;
        sb += y;
        if sa - sb > eps {
            return false;
        }
    }
    true
}

/// Classification of an ordered pair `(a, b)` by the equality structure of
/// `a ≺ b`; selects which auxiliary-state construction applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PairClass {
    Incomparable { first_violation: usize },
    /// Every nontrivial prefix is an equality: the spectra coincide.
    Identical { delta: Vec<usize>, eta: usize },
    StrictAll,
    /// Equalities only at interior, pairwise non-adjacent prefix lengths.
    IsolatedInterior { delta: Vec<usize> },
    /// `n - 1` is an equality, i.e. the smallest entries agree.
    TrailingEquality { delta: Vec<usize>, eta: usize },
    GeneralBlocks { delta: Vec<usize>, eta: usize },
}

impl PairClass {
    pub fn from_report(report: &MajorizationReport, n: usize) -> Self {
        if !report.holds {
            return Self::Incomparable {
                first_violation: report.first_violation.unwrap_or(1),
            };
        }
        let delta = report.equality_indices.clone();
        let eta = report.eta;
        if delta.len() == n.saturating_sub(1) {
            return Self::Identical { delta, eta };
        }
        if delta.is_empty() {
            return Self::StrictAll;
        }
        if delta.contains(&(n - 1)) {
            return Self::TrailingEquality { delta, eta };
        }
        let adjacent = delta.windows(2).any(|w| w[1] == w[0] + 1);
        if !delta.contains(&1) && !adjacent {
            Self::IsolatedInterior { delta }
        } else {
            Self::GeneralBlocks { delta, eta }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Incomparable { .. } => "incomparable",
            Self::Identical { .. } => "identical",
            Self::StrictAll => "strict",
            Self::IsolatedInterior { .. } => "isolated-interior",
            Self::TrailingEquality { .. } => "trailing-equality",
            Self::GeneralBlocks { .. } => "general-blocks",
        }
    }

    pub fn is_comparable(&self) -> bool {
        !matches!(self, Self::Incomparable { .. })
    }

    /// Equality set; empty for strict and incomparable pairs.
    pub fn delta(&self) -> &[usize] {
        match self {
            Self::Incomparable { .. } | Self::StrictAll => &[],
            Self::Identical { delta, .. }
            | Self::IsolatedInterior { delta }
            | Self::TrailingEquality { delta, .. }
            | Self::GeneralBlocks { delta, .. } => delta,
        }
    }

    pub fn eta(&self) -> usize {
        match self {
            Self::Incomparable { .. } | Self::StrictAll => 0,
            Self::IsolatedInterior { .. } => 1,
            Self::Identical { eta, .. }
            | Self::TrailingEquality { eta, .. }
            | Self::GeneralBlocks { eta, .. } => *eta,
        }
    }
}

pub fn classify_pair(
    a: &SchmidtVector,
    b: &SchmidtVector,
    tol: Tolerance,
) -> Result<PairClass, DimensionMismatch> {
    let report = majorize(a, b, tol)?;
    Ok(PairClass::from_report(&report, a.dim()))
}
