#![allow(dead_code)]

use locc_recovery::{make_schmidt, SchmidtVector, Tolerance};

pub fn sv(raw: &[f64]) -> SchmidtVector {
    make_schmidt(raw, Tolerance::default()).unwrap()
}

pub fn example() -> (SchmidtVector, SchmidtVector) {
    (sv(&[0.4, 0.3, 0.2, 0.1]), sv(&[0.5, 0.3, 0.2, 0.0]))
}

/// Equal largest coefficients only.
pub fn leading_equal() -> (SchmidtVector, SchmidtVector) {
    (sv(&[0.4, 0.25, 0.2, 0.15]), sv(&[0.4, 0.3, 0.2, 0.1]))
}

/// Equal largest and equal smallest coefficients.
pub fn both_ends() -> (SchmidtVector, SchmidtVector) {
    (sv(&[0.4, 0.35, 0.15, 0.1]), sv(&[0.4, 0.4, 0.1, 0.1]))
}

/// Equality set {2, 3, 5} in dimension 7.
pub fn blocks_235() -> (SchmidtVector, SchmidtVector) {
    (
        sv(&[0.28, 0.22, 0.15, 0.12, 0.11, 0.06, 0.06]),
        sv(&[0.3, 0.2, 0.15, 0.13, 0.1, 0.07, 0.05]),
    )
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
