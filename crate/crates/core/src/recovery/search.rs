//! Candidate certification shared by all constructions, and the general
//! k-level search.

use crate::exec::find_map_first;
use crate::genpairs::random_descending_with;
use crate::majorization::{majorize, prefix_sums_of, PairClass};
use crate::rng;
use crate::spectra::{SchmidtVector, Tolerance};

use super::epsilon::{transferred, TransferProbe};
use super::{
    check_dims, lower_bound_from_delta, verify_pair, Perturbation, RecoveryCertificate,
    RecoveryError, RecoveryOptions, RecoveryOutcome, RecoveryPair,
};

/// Whether every prefix equality of `lhs ≺ rhs` survives a small transfer
/// on the right-hand side.
fn equalities_are_benign(probe: &mut TransferProbe<'_>, report_delta: &[usize], tol: Tolerance) -> bool {
    if report_delta.is_empty() {
        return true;
    }
    let delta = (tol.eq_tol() * 1e3).min(probe.cap()) / 2.0;
    if delta <= 0.0 {
        return true;
    }
    let lhs = prefix_sums_of(probe.lhs());
    let rhs = prefix_sums_of(probe.rhs_at(delta));
    report_delta
        .iter()
        .all(|&m| tol.eq(lhs[m - 1], rhs[m - 1]))
}

/// Tests one auxiliary `chi`: the parents' products must be comparable with
/// only benign equalities, and a strictly positive transfer from `donor` to
/// `receiver` must exist. Returns the certified pair.
pub(crate) fn certify_candidate(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    chi: &SchmidtVector,
    donor: usize,
    receiver: usize,
    opts: &RecoveryOptions,
) -> Option<RecoveryCertificate> {
    let tol = opts.tol;
    let mut probe = TransferProbe::new(psi, phi, chi, donor, receiver, tol);
    if probe.cap() <= opts.bisection.tol {
        return None;
    }
    let report = probe.report_at(0.0);
    if !report.holds || !equalities_are_benign(&mut probe, &report.equality_indices, tol) {
        return None;
    }
    let eps_max = probe.sup(opts.bisection)?;
    if eps_max <= opts.bisection.tol {
        return None;
    }
    let epsilon = opts.epsilon_fraction * eps_max;
    let mut omega = Vec::with_capacity(chi.dim());
    transferred(chi, donor, receiver, epsilon, &mut omega);
    let pair = RecoveryPair {
        k: chi.dim(),
        chi: chi.clone(),
        omega: SchmidtVector::from_raw_unchecked(omega),
        perturbation: Some(Perturbation {
            donor,
            receiver,
            epsilon,
            epsilon_max: eps_max,
        }),
    };
    verify_pair(psi, phi, pair, tol).ok()
}

/// Auxiliary spectra with prescribed successive ratios `p[i+1] / p[i]`.
///
/// Each ratio ranges over `levels` evenly spaced values in `(0, 1)`, giving
/// `levels^(k-1)` points enumerated in lexicographic order of the ratio
/// indices. `levels` is the largest value whose lattice fits in `budget`
/// (at least 2).
pub fn ratio_lattice(k: usize, budget: usize) -> Vec<SchmidtVector> {
    assert!(k >= 2, "auxiliary dimension must be at least 2");
    let free = (k - 1) as u32;
    let mut levels = 2usize;
    while (levels + 1).checked_pow(free).is_some_and(|c| c <= budget) {
        levels += 1;
    }
    let grid: Vec<f64> = (0..levels).map(|j| (j as f64 + 0.5) / levels as f64).collect();
    let total = levels.pow(free);
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; k - 1];
    for _ in 0..total {
        let mut values = Vec::with_capacity(k);
        let mut x = 1.0;
        values.push(x);
        for &d in &digits {
            x *= grid[d];
            values.push(x);
        }
        let sum: f64 = values.iter().sum();
        out.push(SchmidtVector::from_raw_unchecked(
            values.iter().map(|v| v / sum).collect(),
        ));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < levels {
                break;
            }
            *d = 0;
        }
    }
    out
}

fn random_candidates(k: usize, count: usize, seed: u64) -> Vec<SchmidtVector> {
    (0..count as u64)
        .map(|i| random_descending_with(k, &mut rng::stream(seed, i)))
        .collect()
}

/// Searches `k`-level auxiliary states whose last entry receives a transfer
/// from the one before it.
///
/// Candidates come first from [`ratio_lattice`], then (with
/// `opts.fallback_random`) from `opts.samples` seeded uniform points of the
/// ordered simplex. The first success in that fixed order is returned.
pub fn recover_kxk(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    k: usize,
    opts: &RecoveryOptions,
) -> Result<RecoveryOutcome, RecoveryError> {
    check_dims(psi, phi)?;
    opts.validate()?;
    if k < 2 {
        return Err(RecoveryError::SearchExhausted { k, candidates: 0 });
    }
    let n = psi.dim();
    let report = majorize(psi, phi, opts.tol).expect("dimensions checked");
    match PairClass::from_report(&report, n) {
        PairClass::Incomparable { first_violation } => {
            return Ok(RecoveryOutcome::NotConvertible { first_violation })
        }
        PairClass::Identical { .. } => return Ok(RecoveryOutcome::NothingLost),
        _ => {}
    }
    let bound = lower_bound_from_delta(&report.equality_indices, n);
    if k < bound {
        return Ok(RecoveryOutcome::ImpossibleAtDim {
            k,
            reason: format!(
                "equal extreme coefficients rule out auxiliary states below dimension {bound}"
            ),
        });
    }
    let (donor, receiver) = (k - 2, k - 1);
    let lattice = ratio_lattice(k, opts.lattice_budget);
    let mut tried = lattice.len();
    if let Some(cert) = find_map_first(opts.exec, &lattice, |chi| {
        certify_candidate(psi, phi, chi, donor, receiver, opts)
    }) {
        return Ok(RecoveryOutcome::Found(Box::new(cert)));
    }
    if opts.fallback_random {
        let randoms = random_candidates(k, opts.samples, opts.seed);
        tried += randoms.len();
        if let Some(cert) = find_map_first(opts.exec, &randoms, |chi| {
            certify_candidate(psi, phi, chi, donor, receiver, opts)
        }) {
            return Ok(RecoveryOutcome::Found(Box::new(cert)));
        }
    }
    Err(RecoveryError::SearchExhausted {
        k,
        candidates: tried,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::make_schmidt;

    fn sv(raw: &[f64]) -> SchmidtVector {
        make_schmidt(raw, Tolerance::default()).unwrap()
    }

    #[test]
    fn lattice_shape() {
        let l = ratio_lattice(3, 20);
        assert_eq!(l.len(), 16);
        for v in &l {
            assert_eq!(v.dim(), 3);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(v.windows(2).all(|w| w[0] > w[1]));
        }
        assert_eq!(ratio_lattice(9, 20_000).len(), 6561);
        assert_eq!(ratio_lattice(2, 10).len(), 10);
    }

    #[test]
    fn one_level_is_exhausted_immediately() {
        let psi = sv(&[0.4, 0.3, 0.2, 0.1]);
        let phi = sv(&[0.5, 0.3, 0.2, 0.0]);
        assert_eq!(
            recover_kxk(&psi, &phi, 1, &RecoveryOptions::default()),
            Err(RecoveryError::SearchExhausted { k: 1, candidates: 0 })
        );
    }

    #[test]
    fn strict_pair_at_two_levels() {
        let psi = sv(&[0.4, 0.3, 0.2, 0.1]);
        let phi = sv(&[0.5, 0.3, 0.2, 0.0]);
        let out = recover_kxk(&psi, &phi, 2, &RecoveryOptions::default()).unwrap();
        assert_eq!(out.certificate().unwrap().k(), 2);
    }

    #[test]
    fn below_lower_bound() {
        let psi = sv(&[0.4, 0.25, 0.2, 0.15]);
        let phi = sv(&[0.4, 0.3, 0.2, 0.1]);
        let out = recover_kxk(&psi, &phi, 2, &RecoveryOptions::default()).unwrap();
        assert!(matches!(out, RecoveryOutcome::ImpossibleAtDim { k: 2, .. }));
    }
}
