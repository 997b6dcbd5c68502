mod common;

use common::{both_ends, example, leading_equal};
use locc_recovery::oracle::{
    grid_search_2x2, grid_search_2x2_with, max_recovery_scan, random_search_kxk, random_search_kxk_with, GridSpec,
    OracleError,
};
use locc_recovery::genpairs::{pair_with_pattern, PatternSpec};
use locc_recovery::{entropy, recover_general, verify_recovery, Execution, RecoveryOptions, Tolerance};

const TOL: Tolerance = Tolerance::DEFAULT;

#[test]
fn example_grid_reaches_the_worked_point() {
    let (psi, phi) = example();
    let scan = grid_search_2x2(&psi, &phi, &GridSpec::default()).unwrap();
    assert!(scan.feasible_count > 0);
    let best = scan.best.unwrap();
    assert!(best.recovered >= 0.0828, "{}", best.recovered);
    verify_recovery(&psi, &phi, &best.chi, &best.omega, TOL).unwrap();
}

#[test]
fn grid_finds_nothing_where_two_levels_cannot_work() {
    let (a, b) = leading_equal();
    assert_eq!(grid_search_2x2(&a, &b, &GridSpec::default()).unwrap().feasible_count, 0);
    let (psi, _) = example();
    let same = grid_search_2x2(&psi, &psi, &GridSpec::default()).unwrap();
    assert_eq!(same.feasible_count, 0);
    assert!(same.best.is_none());
}

#[test]
fn grid_budget() {
    let (psi, phi) = example();
    let grid = GridSpec { resolution: 1e-4, ..GridSpec::default() };
    assert!(matches!(grid_search_2x2(&psi, &phi, &grid), Err(OracleError::BudgetExceeded { .. })));
}

#[test]
fn both_ends_pair_has_no_three_level_recovery_in_sample() {
    let (a, b) = both_ends();
    let grid = GridSpec { samples: 100_000, ..GridSpec::default() };
    let scan = random_search_kxk(&a, &b, 3, &grid).unwrap();
    assert_eq!(scan.points_tested, 100_000);
    assert_eq!(scan.feasible_count, 0);
}

#[test]
fn three_level_sampling_confirms_construction() {
    let (a, b) = leading_equal();
    let scan = random_search_kxk(&a, &b, 3, &GridSpec::default()).unwrap();
    assert!(scan.feasible_count > 0);
    let best = scan.best.unwrap();
    verify_recovery(&a, &b, &best.chi, &best.omega, TOL).unwrap();
    assert!(recover_general(&a, &b, &RecoveryOptions::default()).unwrap().is_found());
}

#[test]
fn two_level_sampling_agrees_with_grid() {
    let (psi, phi) = example();
    let random = random_search_kxk(&psi, &phi, 2, &GridSpec::default()).unwrap();
    let grid = grid_search_2x2(&psi, &phi, &GridSpec::default()).unwrap();
    assert_eq!(random.feasible_count > 0, grid.feasible_count > 0);
}

#[test]
fn scan_table() {
    let (psi, phi) = example();
    let loss = entropy(&psi) - entropy(&phi);
    let scan = max_recovery_scan(&psi, &phi, 4, &GridSpec::default()).unwrap();
    let rows: Vec<usize> = scan.per_k.iter().map(|r| r.k).collect();
    assert_eq!(rows, vec![2, 3, 4]);
    assert!(scan.per_k[0].best_recovered >= 0.0828);
    for w in scan.per_k.windows(2) {
        assert!(w[1].best_recovered >= w[0].best_recovered);
    }
    assert!(scan.per_k.iter().all(|r| r.best_recovered <= loss + 1e-10));
    let best = scan.best.unwrap();
    assert_eq!(best.chi.dim(), 4);
    verify_recovery(&psi, &phi, &best.chi, &best.omega, TOL).unwrap();

    let flipped = max_recovery_scan(&phi, &psi, 3, &GridSpec::default()).unwrap();
    assert!(flipped.not_convertible);
    assert!(flipped.per_k.iter().all(|r| r.best_recovered == 0.0 && r.feasible_count == 0));
}

#[test]
fn scans_are_deterministic_across_strategies() {
    let (psi, phi) = example();
    let grid = GridSpec { seed: 99, samples: 5_000, ..GridSpec::default() };
    let a = random_search_kxk_with(&psi, &phi, 3, &grid, TOL, Execution::Sequential).unwrap();
    let b = random_search_kxk_with(&psi, &phi, 3, &grid, TOL, Execution::default()).unwrap();
    let c = random_search_kxk(&psi, &phi, 3, &grid).unwrap();
    assert_eq!(a, b);
    assert_eq!(b, c);
    let coarse = GridSpec { resolution: 0.01, ..grid };
    assert_eq!(
        grid_search_2x2_with(&psi, &phi, &coarse, TOL, Execution::Sequential).unwrap(),
        grid_search_2x2_with(&psi, &phi, &coarse, TOL, Execution::default()).unwrap()
    );
}

#[test]
fn padded_recoveries_stay_feasible() {
    let (psi, phi) = example();
    let scan = random_search_kxk(&psi, &phi, 3, &GridSpec { samples: 2_000, ..GridSpec::default() }).unwrap();
    let best = scan.best.unwrap();
    let padded = verify_recovery(&psi, &phi, &best.chi.padded(1), &best.omega.padded(1), TOL).unwrap();
    assert!((padded.recovered - best.recovered).abs() < 1e-12);
}

#[test]
fn tolerance_slack_is_not_feasibility() {
    // Equal extreme coefficients; a draw with chi[1] ≈ chi[2] and a ~4e-10
    // transfer violates a product prefix by ~4e-13, inside the default tol.
    let (psi, phi) = pair_with_pattern(&PatternSpec::new(7, vec![1, 6], 1018)).unwrap();
    let grid = GridSpec { samples: 100_000, ..GridSpec::default() };
    let scan = random_search_kxk(&psi, &phi, 3, &grid).unwrap();
    assert_eq!(scan.feasible_count, 0, "{:?}", scan.best);
}
