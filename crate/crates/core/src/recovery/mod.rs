//! Synthesis and verification of recovery pairs.
//!
//! A recovery pair `(chi, omega)` of `k`-dimensional auxiliary spectra lets
//! `psi ⊗ chi` be converted deterministically into `phi ⊗ omega` while
//! `omega` carries strictly more entanglement than `chi`, so part of the
//! entropy lost in `psi -> phi` is won back.
//!
//! Every construction follows the same pattern: pick an auxiliary `chi` for
//! which `psi ⊗ chi ≺ phi ⊗ chi` holds with no equality that a small
//! perturbation would break, then find the largest transfer ε inside `chi`
//! that keeps the majorization, and return `omega = chi` after the transfer.
//! Which `chi` works depends on the equality structure of `psi ≺ phi`:
//!
//! | pair class                        | auxiliary dimension        |
//! |-----------------------------------|----------------------------|
//! | strict, isolated interior         | 2 ([`recover_2x2`])        |
//! | equality set `{1}`                | 3 ([`recover_3x3_delta1`]) |
//! | other blocks, last entries differ | η + 2 ([`recover_kxk`])    |
//! | last entries equal                | unknown (open problem)     |
//!
//! Every `Found` outcome carries a certificate produced by
//! [`verify_recovery`], which recomputes the product spectra from scratch.

pub(crate) mod epsilon;
mod qubit;
mod qutrit;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::majorization::{majorize, MajorizationReport, PairClass};
use crate::oracle::{self, GridSpec};
use crate::spectra::{entropy, tensor_spectrum, SchmidtVector, Tolerance};

pub use epsilon::{epsilon_max, epsilon_max_with, Bisection};
pub use qubit::{critical_points_2x2, interval_upper_bound_a, recover_2x2};
pub use qutrit::{qutrit_region, recover_3x3_delta1, QutritCase, QutritRegion};
pub use search::{ratio_lattice, recover_kxk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyFailure {
    MajorizationFailed,
    NoEntropyGain,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecoveryError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("psi is not majorized by phi")]
    NotConvertible,
    #[error("not a recovery: {0:?}")]
    NotARecovery(VerifyFailure),
    #[error("{construction} does not apply to a {class} pair")]
    NotApplicable {
        construction: &'static str,
        class: &'static str,
    },
    #[error("majorization already fails before any transfer")]
    NotFeasibleAtZero,
    #[error("feasible region is empty")]
    EmptyRegion,
    #[error("search exhausted after {candidates} candidates at k = {k}")]
    SearchExhausted { k: usize, candidates: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Transfer that turned `chi` into `omega`. Indices are 0-based positions
/// in the sorted `chi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub donor: usize,
    pub receiver: usize,
    pub epsilon: f64,
    /// Largest admissible transfer found by bisection.
    pub epsilon_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryPair {
    pub chi: SchmidtVector,
    pub omega: SchmidtVector,
    pub k: usize,
    pub perturbation: Option<Perturbation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryCertificate {
    pub pair: RecoveryPair,
    /// Report for `psi ⊗ chi ≺ phi ⊗ omega`.
    pub report: MajorizationReport,
    /// `E(omega) - E(chi)` in nats.
    pub recovered: f64,
    /// `E(psi) - E(phi)` in nats.
    pub loss: f64,
    /// Auxiliary dimension below the parent dimension.
    pub genuine: bool,
    /// Smallest auxiliary dimension not excluded by the endpoint equalities.
    pub efficient_bound: usize,
}

impl RecoveryCertificate {
    pub fn k(&self) -> usize {
        self.pair.k
    }

    pub fn is_efficient(&self) -> bool {
        self.pair.k == self.efficient_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RecoveryOutcome {
    Found(Box<RecoveryCertificate>),
    /// Excluded by the endpoint-equality lower bound on `k`.
    ImpossibleAtDim { k: usize, reason: String },
    /// The smallest entries of `psi` and `phi` agree; no construction is known.
    OpenProblem { reason: String },
    NotConvertible { first_violation: usize },
    /// `psi` and `phi` coincide, so nothing was lost.
    NothingLost,
}

impl RecoveryOutcome {
    pub fn certificate(&self) -> Option<&RecoveryCertificate> {
        match self {
            Self::Found(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Self::Found(_))
    }
}

pub(crate) const OPEN_PROBLEM_REASON: &str = "the smallest Schmidt coefficients of psi and phi are \
equal; whether any recovery exists in this case is an open problem";

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOptions {
    pub tol: Tolerance,
    /// Fraction of the maximal transfer applied to form `omega`, in `(0, 1]`.
    pub epsilon_fraction: f64,
    pub bisection: Bisection,
    /// Run the randomized oracle when no construction is known.
    pub heuristic: bool,
    /// Fall back to seeded random auxiliary states when the deterministic
    /// candidates of [`recover_kxk`] all fail.
    pub fallback_random: bool,
    pub samples: usize,
    pub seed: u64,
    /// Cap on deterministic ratio-lattice candidates in [`recover_kxk`].
    pub lattice_budget: usize,
    /// Evaluate only this `p` in [`recover_2x2`].
    pub forced_p: Option<f64>,
    pub exec: Execution,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            epsilon_fraction: 1.0,
            bisection: Bisection::default(),
            heuristic: false,
            fallback_random: true,
            samples: 10_000,
            seed: 0,
            lattice_budget: 20_000,
            forced_p: None,
            exec: Execution::default(),
        }
    }
}

impl RecoveryOptions {
    pub fn with_tol(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_epsilon_fraction(mut self, fraction: f64) -> Self {
        self.epsilon_fraction = fraction;
        self
    }

    pub fn with_forced_p(mut self, p: f64) -> Self {
        self.forced_p = Some(p);
        self
    }

    pub fn with_heuristic(mut self, heuristic: bool) -> Self {
        self.heuristic = heuristic;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn validate(&self) -> Result<(), RecoveryError> {
        if !(self.epsilon_fraction > 0.0 && self.epsilon_fraction <= 1.0) {
            return Err(RecoveryError::InvalidParameter(format!(
                "epsilon fraction {} outside (0, 1]",
                self.epsilon_fraction
            )));
        }
        Ok(())
    }
}

fn check_dims(psi: &SchmidtVector, phi: &SchmidtVector) -> Result<(), RecoveryError> {
    if psi.dim() != phi.dim() {
        return Err(RecoveryError::DimensionMismatch {
            left: psi.dim(),
            right: phi.dim(),
        });
    }
    Ok(())
}

/// Independently checks that `(chi, omega)` recovers entanglement for
/// `psi -> phi` and returns the certificate.
pub fn verify_recovery(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    chi: &SchmidtVector,
    omega: &SchmidtVector,
    tol: Tolerance,
) -> Result<RecoveryCertificate, RecoveryError> {
    verify_pair(
        psi,
        phi,
        RecoveryPair {
            k: chi.dim(),
            chi: chi.clone(),
            omega: omega.clone(),
            perturbation: None,
        },
        tol,
    )
}

pub(crate) fn verify_pair(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    pair: RecoveryPair,
    tol: Tolerance,
) -> Result<RecoveryCertificate, RecoveryError> {
    check_dims(psi, phi)?;
    if pair.chi.dim() != pair.omega.dim() {
        return Err(RecoveryError::DimensionMismatch {
            left: pair.chi.dim(),
            right: pair.omega.dim(),
        });
    }
    let parents = majorize(psi, phi, tol).expect("dimensions checked");
    if !parents.holds {
        return Err(RecoveryError::NotConvertible);
    }
    let lhs = tensor_spectrum(psi, &pair.chi);
    let rhs = tensor_spectrum(phi, &pair.omega);
    let report = majorize(&lhs, &rhs, tol).expect("equal product dimensions");
    if !report.holds {
        return Err(RecoveryError::NotARecovery(VerifyFailure::MajorizationFailed));
    }
    let recovered = entropy(&pair.omega) - entropy(&pair.chi);
    if recovered <= tol.eq_tol() {
        return Err(RecoveryError::NotARecovery(VerifyFailure::NoEntropyGain));
    }
    Ok(RecoveryCertificate {
        genuine: pair.k < psi.dim(),
        efficient_bound: lower_bound_from_delta(&parents.equality_indices, psi.dim()),
        loss: entropy(psi) - entropy(phi),
        recovered,
        report,
        pair,
    })
}

fn lower_bound_from_delta(delta: &[usize], n: usize) -> usize {
    let first = delta.contains(&1);
    let last = n >= 2 && delta.contains(&(n - 1));
    2 + usize::from(first) + usize::from(last)
}

/// Smallest auxiliary dimension not ruled out by equal largest and/or equal
/// smallest coefficients: 2 if neither end agrees, 3 if one does, 4 if both.
pub fn dimension_lower_bound(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    tol: Tolerance,
) -> Result<usize, RecoveryError> {
    check_dims(psi, phi)?;
    let report = majorize(psi, phi, tol).expect("dimensions checked");
    Ok(lower_bound_from_delta(&report.equality_indices, psi.dim()))
}

/// Classifies the pair and runs the matching construction.
///
/// Strict and isolated-interior pairs get a 2×2 recovery, the `{1}` pattern
/// a 3×3 one and other patterns with distinct smallest coefficients a
/// `(η + 2)`-dimensional one. When `η + 2` reaches `n` (equalities at every
/// prefix but the last), the genuine dimensions below `n` are searched
/// first; the result has `genuine = false` only if none of them works. Pairs whose smallest coefficients agree yield
/// [`RecoveryOutcome::OpenProblem`] unless `opts.heuristic` is set, in which
/// case the random oracle is tried at every genuine dimension from the
/// lower bound up.
pub fn recover_general(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    opts: &RecoveryOptions,
) -> Result<RecoveryOutcome, RecoveryError> {
    check_dims(psi, phi)?;
    opts.validate()?;
    let n = psi.dim();
    let report = majorize(psi, phi, opts.tol).expect("dimensions checked");
    match PairClass::from_report(&report, n) {
        PairClass::Incomparable { first_violation } => {
            Ok(RecoveryOutcome::NotConvertible { first_violation })
        }
        PairClass::Identical { .. } => Ok(RecoveryOutcome::NothingLost),
        PairClass::StrictAll | PairClass::IsolatedInterior { .. } => recover_2x2(psi, phi, opts),
        PairClass::GeneralBlocks { delta, .. } if delta == [1] => {
            recover_3x3_delta1(psi, phi, opts)
        }
        PairClass::GeneralBlocks { delta, eta } => {
            // With delta = {1..n-2} the block formula gives k = n, which is
            // not genuine; smaller dimensions sometimes still work.
            if eta + 2 >= n {
                for k in lower_bound_from_delta(&delta, n)..n {
                    if let Ok(found @ RecoveryOutcome::Found(_)) = recover_kxk(psi, phi, k, opts) {
                        return Ok(found);
                    }
                }
            }
            recover_kxk(psi, phi, eta + 2, opts)
        }
        PairClass::TrailingEquality { delta, .. } => {
            if opts.heuristic {
                if let Some(cert) = heuristic_search(psi, phi, &delta, opts) {
                    return Ok(RecoveryOutcome::Found(Box::new(cert)));
                }
            }
            Ok(RecoveryOutcome::OpenProblem {
                reason: OPEN_PROBLEM_REASON.to_string(),
            })
        }
    }
}

fn heuristic_search(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    delta: &[usize],
    opts: &RecoveryOptions,
) -> Option<RecoveryCertificate> {
    let n = psi.dim();
    let grid = GridSpec {
        samples: opts.samples,
        seed: opts.seed,
        ..GridSpec::default()
    };
    (lower_bound_from_delta(delta, n)..n).find_map(|k| {
        let scan = oracle::random_search_kxk_with(psi, phi, k, &grid, opts.tol, opts.exec).ok()?;
        let best = scan.best?;
        verify_recovery(psi, phi, &best.chi, &best.omega, opts.tol).ok()
    })
}
