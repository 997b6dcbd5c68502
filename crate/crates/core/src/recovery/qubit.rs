//! Two-level auxiliary states `chi(p) = (p, 1 - p)`.

use crate::exec::find_map_first;
use crate::majorization::{majorize, PairClass};
use crate::spectra::{SchmidtVector, Tolerance};

use super::search::certify_candidate;
use super::{check_dims, RecoveryError, RecoveryOptions, RecoveryOutcome};

/// Values of `p` in `(1/2, 1)` at which two entries of `psi ⊗ chi(p)` or
/// `phi ⊗ chi(p)` cross, i.e. `p u = (1 - p) v` for coefficients `u < v`.
///
/// Between consecutive points the sorted order of both product spectra is
/// fixed. The result is sorted and deduplicated within `tol`.
pub fn critical_points_2x2(psi: &SchmidtVector, phi: &SchmidtVector, tol: Tolerance) -> Vec<f64> {
    let mut coeffs: Vec<f64> = psi.iter().chain(phi.iter()).copied().filter(|&x| x > 0.0).collect();
    coeffs.sort_by(|a, b| a.total_cmp(b));
    coeffs.dedup_by(|a, b| tol.eq(*a, *b));
    let mut points = Vec::new();
    for (i, &u) in coeffs.iter().enumerate() {
        for &v in &coeffs[i + 1..] {
            let p = v / (u + v);
            if p > 0.5 && p < 1.0 {
                points.push(p);
            }
        }
    }
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup_by(|a, b| tol.eq(*a, *b));
    points
}

/// Upper end `a` of the search interval `(1/2, a)` for pairs whose equality
/// set `delta` is interior and has no adjacent members.
///
/// `a` is the minimum, over the segments between consecutive equalities
/// (and the two ends), of `x_first / (x_first + x_last)` for both spectra.
/// A term equal to 1/2 (a constant segment) is replaced by 1 and never
/// binds. An empty `delta` gives `a = 1`.
pub fn interval_upper_bound_a(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    delta: &[usize],
    tol: Tolerance,
) -> Result<f64, RecoveryError> {
    check_dims(psi, phi)?;
    let n = psi.dim();
    let not_applicable = RecoveryError::NotApplicable {
        construction: "interval bound",
        class: "non-isolated",
    };
    if delta.is_empty() {
        return Ok(1.0);
    }
    let interior = delta.iter().all(|&m| m > 1 && m + 1 < n);
    let separated = delta.windows(2).all(|w| w[1] >= w[0] + 2);
    if !interior || !separated {
        return Err(not_applicable);
    }
    let term = |x: &SchmidtVector, first: usize, last: usize| {
        let (hi, lo) = (x[first - 1], x[last - 1]);
        if hi + lo <= 0.0 {
            return 1.0;
        }
        let r = hi / (hi + lo);
        if tol.eq(r, 0.5) {
            1.0
        } else {
            r
        }
    };
    let mut a: f64 = 1.0;
    let mut start = 0;
    for &end in delta.iter().chain(std::iter::once(&n)) {
        a = a.min(term(psi, start + 1, end)).min(term(phi, start + 1, end));
        start = end;
    }
    Ok(a)
}

fn search_points(lo: f64, hi: f64, critical: &[f64], tol: Tolerance) -> (Vec<f64>, Vec<f64>) {
    let mut bounds = vec![lo];
    bounds.extend(critical.iter().copied().filter(|&c| c > lo && c < hi));
    bounds.push(hi);
    let intervals: Vec<(f64, f64)> = bounds
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|(a, b)| b - a > tol.eq_tol())
        .collect();
    let mids = intervals.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let quarters = intervals
        .iter()
        .flat_map(|(a, b)| [a + 0.25 * (b - a), a + 0.75 * (b - a)])
        .collect();
    (mids, quarters)
}

/// 2×2 recovery for strictly comparable pairs and for pairs with isolated
/// interior equalities.
///
/// Scans `p` over the midpoints of the intervals cut from `(1/2, a)` by the
/// critical points, left to right, then once more over the quarter points;
/// the first `chi(p)` that admits a positive transfer `p -> p - ε` wins and
/// `omega = chi(p - fraction * ε*)`.
pub fn recover_2x2(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    opts: &RecoveryOptions,
) -> Result<RecoveryOutcome, RecoveryError> {
    check_dims(psi, phi)?;
    opts.validate()?;
    let report = majorize(psi, phi, opts.tol).expect("dimensions checked");
    let a = match PairClass::from_report(&report, psi.dim()) {
        PairClass::Incomparable { first_violation } => {
            return Ok(RecoveryOutcome::NotConvertible { first_violation })
        }
        PairClass::StrictAll => 1.0,
        PairClass::IsolatedInterior { delta } => interval_upper_bound_a(psi, phi, &delta, opts.tol)?,
        other => {
            return Err(RecoveryError::NotApplicable {
                construction: "2x2 recovery",
                class: other.name(),
            })
        }
    };

    let try_p = |&p: &f64| certify_candidate(psi, phi, &SchmidtVector::qubit(p), 0, 1, opts);

    if let Some(p) = opts.forced_p {
        if !(p > 0.5 && p < 1.0) {
            return Err(RecoveryError::InvalidParameter(format!("p = {p} outside (1/2, 1)")));
        }
        return try_p(&p)
            .map(|c| RecoveryOutcome::Found(Box::new(c)))
            .ok_or(RecoveryError::SearchExhausted { k: 2, candidates: 1 });
    }

    let critical = critical_points_2x2(psi, phi, opts.tol);
    let (mids, quarters) = search_points(0.5, a, &critical, opts.tol);
    for round in [&mids, &quarters] {
        if let Some(cert) = find_map_first(opts.exec, round, try_p) {
            return Ok(RecoveryOutcome::Found(Box::new(cert)));
        }
    }
    Err(RecoveryError::SearchExhausted {
        k: 2,
        candidates: mids.len() + quarters.len(),
    })
}
