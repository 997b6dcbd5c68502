//! Largest admissible transfer for a fixed auxiliary state.

use crate::majorization::{majorize_slices, majorizes_slices, MajorizationReport};
use crate::spectra::{sort_descending, tensor_into, SchmidtVector, Tolerance};

use super::RecoveryError;

/// Stopping rule for the ε bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    /// Absolute width of the final bracket.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 200,
        }
    }
}

/// Entries of `chi` after moving `amount` from `donor` to `receiver`,
/// re-sorted.
pub(crate) fn transferred(chi: &[f64], donor: usize, receiver: usize, amount: f64, out: &mut Vec<f64>) {
    out.clear();
    out.extend_from_slice(chi);
    out[donor] -= amount;
    out[receiver] += amount;
    sort_descending(out);
}

/// Feasibility of `psi ⊗ chi ≺ phi ⊗ omega(ε)` as a function of ε.
///
/// Moving mass from a larger to a smaller entry makes `omega` more mixed, so
/// every prefix sum of `phi ⊗ omega(ε)` is non-increasing in ε and the
/// feasible set is an interval starting at zero.
pub(crate) struct TransferProbe<'a> {
    phi: &'a [f64],
    chi: &'a [f64],
    donor: usize,
    receiver: usize,
    lhs: Vec<f64>,
    omega: Vec<f64>,
    rhs: Vec<f64>,
    tol: Tolerance,
}

impl<'a> TransferProbe<'a> {
    pub(crate) fn new(
        psi: &'a [f64],
        phi: &'a [f64],
        chi: &'a [f64],
        donor: usize,
        receiver: usize,
        tol: Tolerance,
    ) -> Self {
        let mut lhs = Vec::with_capacity(psi.len() * chi.len());
        tensor_into(psi, chi, &mut lhs);
        Self {
            phi,
            chi,
            donor,
            receiver,
            lhs,
            omega: Vec::with_capacity(chi.len()),
            rhs: Vec::with_capacity(phi.len() * chi.len()),
            tol,
        }
    }

    /// Half the gap between donor and receiver: the transfer that equalizes
    /// them.
    pub(crate) fn cap(&self) -> f64 {
        ((self.chi[self.donor] - self.chi[self.receiver]) / 2.0).max(0.0)
    }

    pub(crate) fn lhs(&self) -> &[f64] {
        &self.lhs
    }

    /// Sorted `phi ⊗ omega(amount)`.
    pub(crate) fn rhs_at(&mut self, amount: f64) -> &[f64] {
        transferred(self.chi, self.donor, self.receiver, amount, &mut self.omega);
        tensor_into(self.phi, &self.omega, &mut self.rhs);
        &self.rhs
    }

    pub(crate) fn report_at(&mut self, amount: f64) -> MajorizationReport {
        self.rhs_at(amount);
        majorize_slices(&self.lhs, &self.rhs, self.tol)
    }

    pub(crate) fn feasible(&mut self, amount: f64) -> bool {
        transferred(self.chi, self.donor, self.receiver, amount, &mut self.omega);
        tensor_into(self.phi, &self.omega, &mut self.rhs);
        majorizes_slices(&self.lhs, &self.rhs, self.tol)
    }

    /// Supremum of the feasible interval, bracketed to `bisection.tol`.
    /// `None` when ε = 0 is already infeasible.
    pub(crate) fn sup(&mut self, bisection: Bisection) -> Option<f64> {
        if !self.feasible(0.0) {
            return None;
        }
        let cap = self.cap();
        if cap == 0.0 || self.feasible(cap) {
            return Some(cap);
        }
        let (mut lo, mut hi) = (0.0, cap);
        for _ in 0..bisection.max_iter {
            if hi - lo <= bisection.tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

/// Largest ε such that moving ε from `chi[donor]` to `chi[receiver]`
/// (0-based, `donor < receiver`) keeps `psi ⊗ chi ≺ phi ⊗ omega`, capped at
/// the equalizing transfer.
pub fn epsilon_max(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    chi: &SchmidtVector,
    donor: usize,
    receiver: usize,
    tol: Tolerance,
) -> Result<f64, RecoveryError> {
    epsilon_max_with(psi, phi, chi, donor, receiver, tol, Bisection::default())
}

pub fn epsilon_max_with(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    chi: &SchmidtVector,
    donor: usize,
    receiver: usize,
    tol: Tolerance,
    bisection: Bisection,
) -> Result<f64, RecoveryError> {
    if psi.dim() != phi.dim() {
        return Err(RecoveryError::DimensionMismatch {
            left: psi.dim(),
            right: phi.dim(),
        });
    }
    if donor >= receiver || receiver >= chi.dim() {
        return Err(RecoveryError::InvalidParameter(format!(
            "transfer ({donor} -> {receiver}) needs donor < receiver < {}",
            chi.dim()
        )));
    }
    TransferProbe::new(psi, phi, chi, donor, receiver, tol)
        .sup(bisection)
        .ok_or(RecoveryError::NotFeasibleAtZero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::make_schmidt;

    fn sv(raw: &[f64]) -> SchmidtVector {
        make_schmidt(raw, Tolerance::default()).unwrap()
    }

    /// Smallest grid point at which the transfer becomes infeasible.
    fn grid_boundary(psi: &SchmidtVector, phi: &SchmidtVector, chi: &SchmidtVector, steps: usize) -> f64 {
        let cap = (chi[0] - chi[1]) / 2.0;
        let tol = Tolerance::default();
        let lhs = crate::spectra::tensor_spectrum(psi, chi);
        for i in 0..=steps {
            let eps = cap * i as f64 / steps as f64;
            let omega = SchmidtVector::qubit(chi[0] - eps);
            let rhs = crate::spectra::tensor_spectrum(phi, &omega);
            if !crate::majorization::majorize(&lhs, &rhs, tol).unwrap().holds {
                return eps;
            }
        }
        cap
    }

    #[test]
    fn example_bound() {
        let psi = sv(&[0.4, 0.3, 0.2, 0.1]);
        let phi = sv(&[0.5, 0.3, 0.2, 0.0]);
        let chi = SchmidtVector::qubit(0.8);
        let eps = epsilon_max(&psi, &phi, &chi, 0, 1, Tolerance::default()).unwrap();
        assert!((eps - 0.08).abs() < 1e-6, "{eps}");
    }

    #[test]
    fn grid_oracle_agrees() {
        let psi = sv(&[0.4, 0.3, 0.2, 0.1]);
        let phi = sv(&[0.5, 0.3, 0.2, 0.0]);
        for p in [0.72, 0.8, 0.9, 0.99] {
            let chi = SchmidtVector::qubit(p);
            let eps = epsilon_max(&psi, &phi, &chi, 0, 1, Tolerance::default()).unwrap();
            let steps = 10_000;
            let step = (chi[0] - chi[1]) / 2.0 / steps as f64;
            let boundary = grid_boundary(&psi, &phi, &chi, steps);
            assert!((eps - boundary).abs() <= 2.0 * step, "p={p}: {eps} vs {boundary}");
        }
    }

    #[test]
    fn balanced_auxiliary_has_no_room() {
        let psi = sv(&[0.4, 0.3, 0.2, 0.1]);
        let phi = sv(&[0.5, 0.3, 0.2, 0.0]);
        let chi = SchmidtVector::qubit(0.5);
        assert_eq!(epsilon_max(&psi, &phi, &chi, 0, 1, Tolerance::default()), Ok(0.0));
    }

    #[test]
    fn infeasible_start() {
        let psi = sv(&[0.4, 0.3, 0.2, 0.1]);
        let phi = sv(&[0.5, 0.3, 0.2, 0.0]);
        let chi = SchmidtVector::qubit(0.8);
        assert_eq!(
            epsilon_max(&phi, &psi, &chi, 0, 1, Tolerance::default()),
            Err(RecoveryError::NotFeasibleAtZero)
        );
        assert!(matches!(
            epsilon_max(&psi, &phi, &chi, 1, 0, Tolerance::default()),
            Err(RecoveryError::InvalidParameter(_))
        ));
    }
}
