mod common;

use common::{close, sv};
use locc_recovery::genpairs::{
    mix_toward_uniform, pair_with_pattern, random_descending, robin_hood, GenError, PatternSpec,
};
use locc_recovery::{classify_pair, majorize, make_schmidt, PairClass, SchmidtVector, Tolerance};

const TOL: Tolerance = Tolerance::DEFAULT;

#[test]
fn random_descending_basics() {
    assert_eq!(random_descending(1, 5).values(), &[1.0]);
    assert_eq!(random_descending(4, 5), random_descending(4, 5));
    for seed in 0..100 {
        let v = random_descending(6, seed);
        assert!(make_schmidt(v.values(), TOL).is_ok());
        assert!(v.windows(2).all(|w| w[0] > w[1]) && v[5] > 0.0);
    }
}

#[test]
fn mixing_example() {
    let psi = mix_toward_uniform(&sv(&[0.5, 0.3, 0.2, 0.0]), 0.5).unwrap();
    for (a, b) in psi.iter().zip([0.375, 0.275, 0.225, 0.125]) {
        assert!(close(*a, b, 1e-15));
    }
    let phi = sv(&[0.5, 0.3, 0.2, 0.0]);
    assert!(majorize(&psi, &phi, TOL).unwrap().strict_all);
    let tiny = mix_toward_uniform(&phi, 1e-9).unwrap();
    assert!(tiny.iter().zip(phi.iter()).all(|(a, b)| close(*a, *b, 1e-9)));
    assert_eq!(mix_toward_uniform(&SchmidtVector::uniform(3), 0.5), Err(GenError::UniformInput));
}

#[test]
fn pattern_examples() {
    let (psi, phi) = pair_with_pattern(&PatternSpec::new(7, vec![2, 3, 5], 1)).unwrap();
    assert_eq!(majorize(&psi, &phi, TOL).unwrap().delta(), &[2, 3, 5]);
    let (psi, phi) = pair_with_pattern(&PatternSpec::new(4, vec![1], 1)).unwrap();
    assert_eq!(
        classify_pair(&psi, &phi, TOL).unwrap(),
        PairClass::GeneralBlocks { delta: vec![1], eta: 1 }
    );
    let (psi, phi) = pair_with_pattern(&PatternSpec::new(4, vec![], 1)).unwrap();
    assert_eq!(classify_pair(&psi, &phi, TOL).unwrap(), PairClass::StrictAll);
    assert!(matches!(
        pair_with_pattern(&PatternSpec::new(3, vec![1, 2], 1)),
        Err(GenError::PatternInfeasible(_))
    ));
    assert!(matches!(
        pair_with_pattern(&PatternSpec::new(4, vec![4], 1)),
        Err(GenError::InvalidParameter(_))
    ));
    assert!(matches!(
        pair_with_pattern(&PatternSpec::new(4, vec![], 1).with_margin(0.3)),
        Err(GenError::InvalidParameter(_))
    ));
}

#[test]
fn pattern_margins_hold() {
    for seed in 0..100 {
        let spec = PatternSpec::new(6, vec![2, 4], seed);
        let (psi, phi) = pair_with_pattern(&spec).unwrap();
        let (sp, sf) = (locc_recovery::prefix_sums(&psi), locc_recovery::prefix_sums(&phi));
        for m in [1, 3, 5] {
            assert!(sf[m - 1] - sp[m - 1] >= spec.margin);
        }
    }
}

#[test]
fn robin_hood_examples() {
    let chi = sv(&[0.8, 0.2]);
    let omega = robin_hood(&chi, 0, 1, 0.07).unwrap();
    assert!(close(omega[0], 0.73, 1e-15) && close(omega[1], 0.27, 1e-15));
    assert_eq!(robin_hood(&chi, 0, 1, 0.0).unwrap(), chi);
    assert_eq!(robin_hood(&chi, 0, 1, 0.3).unwrap().values(), &[0.5, 0.5]);
    assert!(matches!(robin_hood(&chi, 1, 0, 0.1), Err(GenError::InvalidTransfer(_))));
    assert!(matches!(robin_hood(&chi, 0, 1, 0.31), Err(GenError::InvalidTransfer(_))));
}
