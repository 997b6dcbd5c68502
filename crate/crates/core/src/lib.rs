//! Deterministic LOCC convertibility of bipartite pure states and partial
//! recovery of the entanglement lost in such conversions.
//!
//! States are represented by their Schmidt spectra ([`SchmidtVector`]). A
//! conversion `psi -> phi` is possible with certainty exactly when
//! `psi ≺ phi` ([`majorize`]). Given such a pair, [`recover_general`] builds
//! auxiliary states `(chi, omega)` of small dimension with
//! `psi ⊗ chi -> phi ⊗ omega` and `E(omega) > E(chi)`, and the [`oracle`]
//! module cross-checks constructions by brute force.

pub mod exec;
pub mod genpairs;
pub mod majorization;
pub mod oracle;
pub mod recovery;
pub mod rng;
pub mod spectra;

pub use exec::Execution;
pub use majorization::{classify_pair, majorize, prefix_sums, MajorizationReport, PairClass};
pub use recovery::{
    dimension_lower_bound, epsilon_max, recover_general, verify_recovery, RecoveryCertificate,
    RecoveryError, RecoveryOptions, RecoveryOutcome, RecoveryPair,
};
pub use spectra::{entropy, make_schmidt, tensor_spectrum, SchmidtVector, Tolerance};
