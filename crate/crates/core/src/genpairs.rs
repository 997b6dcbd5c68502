//! Seeded generation of comparable pairs with a prescribed equality set.
//!
//! Pairs `(psi, phi)` are built from `phi` by mixing each segment between
//! consecutive equality anchors toward its own mean. Mixing keeps every
//! segment sum (so anchored prefix sums stay equal), pushes every interior
//! prefix sum strictly down, and cannot break the global ordering because a
//! segment's last entry only grows while the next segment's first entry only
//! shrinks.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::majorization::{majorize, prefix_sums_of};
use crate::rng;
use crate::spectra::{SchmidtVector, Tolerance};

pub const DEFAULT_MARGIN: f64 = 0.01;
const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("uniform spectrum cannot be strictly mixed")]
    UniformInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pattern infeasible: {0}")]
    PatternInfeasible(String),
    #[error("invalid transfer: {0}")]
    InvalidTransfer(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub n: usize,
    /// Target equality set, as 1-based prefix lengths in `1..n`.
    pub delta: Vec<usize>,
    /// Minimum prefix-sum gap at every index outside `delta`.
    pub margin: f64,
    pub seed: u64,
}

impl PatternSpec {
    pub fn new(n: usize, delta: Vec<usize>, seed: u64) -> Self {
        Self {
            n,
            delta,
            margin: DEFAULT_MARGIN,
            seed,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::InvalidParameter("n must be positive".into()));
        }
        if !(self.margin > 0.0 && (self.n as f64) * self.margin < 1.0) {
            return Err(GenError::InvalidParameter(format!(
                "margin {} must satisfy 0 < n * margin < 1",
                self.margin
            )));
        }
        if self.delta.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GenError::InvalidParameter(
                "delta must be strictly increasing".into(),
            ));
        }
        if self.delta.iter().any(|&m| m == 0 || m >= self.n) {
            return Err(GenError::InvalidParameter(format!(
                "delta members must lie in 1..{}",
                self.n.saturating_sub(1)
            )));
        }
        Ok(())
    }
}

/// Random interior point of the ordered simplex: no zeros, no ties.
pub fn random_descending(n: usize, seed: u64) -> SchmidtVector {
    random_descending_with(n, &mut rng::seeded(seed))
}

/// [`random_descending`] drawing from a caller-supplied generator.
///
/// Draws `n` standard exponentials, normalizes and sorts (a uniform sample
/// of the ordered simplex). Samples with ties are redrawn.
pub fn random_descending_with<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> SchmidtVector {
    assert!(n >= 1, "dimension must be positive");
    if n == 1 {
        return SchmidtVector::from_raw_unchecked(vec![1.0]);
    }
    loop {
        let draws: Vec<f64> = (0..n).map(|_| rng::exponential(rng)).collect();
        let total: f64 = draws.iter().sum();
        let v = SchmidtVector::from_raw_unchecked(draws.iter().map(|x| x / total).collect());
        if v.windows(2).all(|w| w[0] > w[1]) && v[n - 1] > 0.0 {
            return v;
        }
    }
}

/// Convex combination `(1 - t) phi + t * uniform`, strictly majorized by
/// `phi` for non-uniform `phi`.
pub fn mix_toward_uniform(phi: &SchmidtVector, t: f64) -> Result<SchmidtVector, GenError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(GenError::InvalidParameter(format!("t = {t} outside (0, 1)")));
    }
    if phi.is_uniform(Tolerance::default()) {
        return Err(GenError::UniformInput);
    }
    let u = 1.0 / phi.dim() as f64;
    Ok(SchmidtVector::from_raw_unchecked(
        phi.iter().map(|&x| (1.0 - t) * x + t * u).collect(),
    ))
}

/// Mixes each segment between anchors toward its own mean.
fn mix_segments(phi: &[f64], anchors: &[usize], t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(phi.len());
    let mut start = 0;
    for &end in anchors.iter().chain(std::iter::once(&phi.len())) {
        let seg = &phi[start..end];
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        out.extend(seg.iter().map(|&x| (1.0 - t) * x + t * mean));
        start = end;
    }
    out
}

/// Builds `(psi, phi)` with `psi ≺ phi` whose equality set is exactly
/// `spec.delta` and whose other prefix gaps are at least `spec.margin`.
pub fn pair_with_pattern(
    spec: &PatternSpec,
) -> Result<(SchmidtVector, SchmidtVector), GenError> {
    spec.validate()?;
    let n = spec.n;
    if spec.delta.len() == n - 1 {
        return Err(GenError::PatternInfeasible(
            "every prefix equal forces psi = phi".into(),
        ));
    }
    let mut rng = rng::seeded(spec.seed);
    let tol = Tolerance::default();
    for _ in 0..MAX_ATTEMPTS {
        let phi = random_descending_with(n, &mut rng);
        let t = rng::uniform(&mut rng, 0.3, 0.95);
        let psi = SchmidtVector::from_raw_unchecked(mix_segments(phi.values(), &spec.delta, t));

        let sp = prefix_sums_of(psi.values());
        let sf = prefix_sums_of(phi.values());
        let margins_ok = (1..n)
            .filter(|m| !spec.delta.contains(m))
            .all(|m| sf[m - 1] - sp[m - 1] >= spec.margin);
        if !margins_ok {
            continue;
        }
        let report = majorize(&psi, &phi, tol).expect("equal dimensions");
        if report.holds && report.equality_indices == spec.delta {
            return Ok((psi, phi));
        }
    }
    Err(GenError::PatternInfeasible(format!(
        "no pair with delta {:?} and margin {} after {MAX_ATTEMPTS} attempts",
        spec.delta, spec.margin
    )))
}

/// Strictly comparable pair: random `phi`, `psi` mixed toward uniform with a
/// random weight.
pub fn strict_pair(n: usize, margin: f64, seed: u64) -> Result<(SchmidtVector, SchmidtVector), GenError> {
    pair_with_pattern(&PatternSpec::new(n, Vec::new(), seed).with_margin(margin))
}

/// Moves `amount` from entry `i` to entry `j` (0-based, `i < j`) and
/// re-sorts. The result is majorized by `v`.
pub fn robin_hood(
    v: &SchmidtVector,
    i: usize,
    j: usize,
    amount: f64,
) -> Result<SchmidtVector, GenError> {
    if i >= j || j >= v.dim() {
        return Err(GenError::InvalidTransfer(format!(
            "indices ({i}, {j}) must satisfy i < j < {}",
            v.dim()
        )));
    }
    let cap = (v[i] - v[j]) / 2.0;
    if !(amount >= 0.0 && amount <= cap + Tolerance::default().eq_tol()) {
        return Err(GenError::InvalidTransfer(format!(
            "amount {amount} outside [0, {cap}]"
        )));
    }
    let amount = amount.min(cap);
    let mut values = v.values().to_vec();
    values[i] -= amount;
    values[j] += amount;
    Ok(SchmidtVector::from_raw_unchecked(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::{classify_pair, PairClass};
    use crate::spectra::make_schmidt;

    #[test]
    fn random_descending_is_valid_and_deterministic() {
        assert_eq!(random_descending(1, 5).values(), &[1.0]);
        let a = random_descending(4, 11);
        assert_eq!(a, random_descending(4, 11));
        assert_ne!(a, random_descending(4, 12));
        let again = make_schmidt(a.values(), Tolerance::default()).unwrap();
        assert_eq!(again, a);
        assert!(a.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn mixing_example() {
        let phi = make_schmidt(&[0.5, 0.3, 0.2, 0.0], Tolerance::default()).unwrap();
        let psi = mix_toward_uniform(&phi, 0.5).unwrap();
        let expected = [0.375, 0.275, 0.225, 0.125];
        for (x, y) in psi.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
        let r = majorize(&psi, &phi, Tolerance::default()).unwrap();
        assert!(r.strict_all);
    }

    #[test]
    fn mixing_limit_and_errors() {
        let phi = make_schmidt(&[0.5, 0.3, 0.2], Tolerance::default()).unwrap();
        let psi = mix_toward_uniform(&phi, 1e-9).unwrap();
        assert!(psi.iter().zip(phi.iter()).all(|(a, b)| (a - b).abs() < 1e-8));
        assert_eq!(
            mix_toward_uniform(&SchmidtVector::uniform(3), 0.5),
            Err(GenError::UniformInput)
        );
        assert!(mix_toward_uniform(&phi, 1.0).is_err());
    }

    #[test]
    fn patterns_are_exact() {
        let (psi, phi) = pair_with_pattern(&PatternSpec::new(7, vec![2, 3, 5], 1)).unwrap();
        let r = majorize(&psi, &phi, Tolerance::default()).unwrap();
        assert_eq!(r.equality_indices, vec![2, 3, 5]);
        assert_eq!(r.eta, 2);

        let (psi, phi) = pair_with_pattern(&PatternSpec::new(4, vec![1], 2)).unwrap();
        assert_eq!(
            classify_pair(&psi, &phi, Tolerance::default()).unwrap(),
            PairClass::GeneralBlocks {
                delta: vec![1],
                eta: 1
            }
        );

        let (psi, phi) = pair_with_pattern(&PatternSpec::new(4, vec![], 3)).unwrap();
        assert_eq!(
            classify_pair(&psi, &phi, Tolerance::default()).unwrap(),
            PairClass::StrictAll
        );
    }

    #[test]
    fn full_pattern_is_infeasible() {
        assert!(matches!(
            pair_with_pattern(&PatternSpec::new(3, vec![1, 2], 0)),
            Err(GenError::PatternInfeasible(_))
        ));
        assert!(matches!(
            pair_with_pattern(&PatternSpec::new(3, vec![0], 0)),
            Err(GenError::InvalidParameter(_))
        ));
        assert!(matches!(
            pair_with_pattern(&PatternSpec::new(4, vec![], 0).with_margin(0.3)),
            Err(GenError::InvalidParameter(_))
        ));
    }

    #[test]
    fn robin_hood_transfers() {
        let chi = SchmidtVector::qubit(0.8);
        let omega = robin_hood(&chi, 0, 1, 0.07).unwrap();
        assert!((omega[0] - 0.73).abs() < 1e-15 && (omega[1] - 0.27).abs() < 1e-15);
        assert_eq!(robin_hood(&chi, 0, 1, 0.0).unwrap(), chi);
        let even = robin_hood(&chi, 0, 1, 0.3).unwrap();
        assert!((even[0] - even[1]).abs() < 1e-15);
        assert!(robin_hood(&chi, 0, 1, 0.31).is_err());
        assert!(robin_hood(&chi, 1, 0, 0.1).is_err());
    }
}
