//! Three-level auxiliary states `chi(p, q) = (p, q, 1 - p - q)` for pairs
//! whose only equality is at the first prefix.

use serde::Serialize;

use crate::exec::find_map_first;
use crate::majorization::{majorize, PairClass};
use crate::spectra::{SchmidtVector, Tolerance};

use super::search::{certify_candidate, recover_kxk};
use super::{check_dims, RecoveryError, RecoveryOptions, RecoveryOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QutritCase {
    /// `alpha_1 > alpha_2 > alpha_n`.
    Descending,
    /// `alpha_2 = alpha_n`; the second bound uses `phi`'s extremes instead.
    FlatTail,
}

/// Half-plane `a p + b q < c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    fn slack(&self, (p, q): (f64, f64)) -> f64 {
        self.c - self.a * p - self.b * q
    }
}

/// Polygon in the `(p, q)` plane: ordered auxiliary states cut by two
/// half-planes that keep the products of the largest coefficients apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QutritRegion {
    pub case: QutritCase,
    pub constraints: [HalfPlane; 2],
    /// Vertices of the closure, counter-clockwise; empty if the region is.
    pub vertices: Vec<(f64, f64)>,
}

impl QutritRegion {
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let twice: f64 = (0..v.len())
            .map(|i| {
                let (x0, y0) = v[i];
                let (x1, y1) = v[(i + 1) % v.len()];
                x0 * y1 - x1 * y0
            })
            .sum();
        0.5 * twice.abs()
    }

    pub fn is_empty(&self) -> bool {
        self.area() <= 1e-14
    }

    /// Vertex average; interior whenever the region has positive area.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let n = self.vertices.len() as f64;
        let (sp, sq) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(a, b), &(p, q)| (a + p, b + q));
        Some((sp / n, sq / n))
    }

    /// Strict membership.
    pub fn contains(&self, (p, q): (f64, f64)) -> bool {
        let r = 1.0 - p - q;
        p >= q
            && q >= r
            && r >= 0.0
            && self.constraints.iter().all(|h| h.slack((p, q)) > 0.0)
    }

    /// Deterministic interior points: the centroid, then points between the
    /// centroid and each vertex.
    pub fn interior_points(&self) -> Vec<(f64, f64)> {
        let Some(c) = self.centroid() else {
            return Vec::new();
        };
        let mut out = vec![c];
        for t in [0.5, 0.8] {
            for &(p, q) in &self.vertices {
                out.push((c.0 + t * (p - c.0), c.1 + t * (q - c.1)));
            }
        }
        out.retain(|&pt| self.contains(pt));
        out
    }
}

/// Sutherland–Hodgman clip of a convex polygon against `h`.
fn clip(poly: &[(f64, f64)], h: &HalfPlane) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let (sc, sn) = (h.slack(cur), h.slack(next));
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc >= 0.0) != (sn >= 0.0) {
            let t = sc / (sc - sn);
            out.push((cur.0 + t * (next.0 - cur.0), cur.1 + t * (next.1 - cur.1)));
        }
    }
    out
}

/// Region of `(p, q)` with `p >= q >= 1 - p - q >= 0`, `q alpha_1 < p alpha_2`
/// and either `p alpha_n < (1 - p - q) alpha_2` (descending case) or
/// `p beta_n < (1 - p - q) beta_1` (flat-tail case).
pub fn qutrit_region(psi: &SchmidtVector, phi: &SchmidtVector, tol: Tolerance) -> QutritRegion {
    let n = psi.dim();
    let (a1, a2, an) = (psi[0], psi[1], psi[n - 1]);
    let (b1, bn) = (phi[0], phi[n - 1]);
    let first = HalfPlane {
        a: -a2,
        b: a1,
        c: 0.0,
    };
    let (case, second) = if a2 - an > tol.eq_tol() {
        (
            QutritCase::Descending,
            HalfPlane {
                a: an + a2,
                b: a2,
                c: a2,
            },
        )
    } else {
        (
            QutritCase::FlatTail,
            HalfPlane {
                a: bn + b1,
                b: b1,
                c: b1,
            },
        )
    };
    let ordered = [(1.0, 0.0), (0.5, 0.5), (1.0 / 3.0, 1.0 / 3.0)];
    let vertices = clip(&clip(&ordered, &first), &second);
    QutritRegion {
        case,
        constraints: [first, second],
        vertices,
    }
}

/// 3×3 recovery for pairs whose only prefix equality is the first one
/// (equal largest coefficients), transferring from the middle entry of
/// `chi` to the smallest.
///
/// Tries interior points of [`qutrit_region`] first. That region can be
/// empty (it needs `alpha_1 alpha_n < alpha_2^2` in the descending case), so
/// the general three-level search of [`recover_kxk`] is the fallback.
pub fn recover_3x3_delta1(
    psi: &SchmidtVector,
    phi: &SchmidtVector,
    opts: &RecoveryOptions,
) -> Result<RecoveryOutcome, RecoveryError> {
    check_dims(psi, phi)?;
    opts.validate()?;
    let report = majorize(psi, phi, opts.tol).expect("dimensions checked");
    match PairClass::from_report(&report, psi.dim()) {
        PairClass::Incomparable { first_violation } => {
            return Ok(RecoveryOutcome::NotConvertible { first_violation })
        }
        PairClass::GeneralBlocks { delta, .. } if delta == [1] && psi.dim() >= 3 => {}
        other => {
            return Err(RecoveryError::NotApplicable {
                construction: "3x3 recovery",
                class: other.name(),
            })
        }
    }

    let region = qutrit_region(psi, phi, opts.tol);
    let points = region.interior_points();
    let found = find_map_first(opts.exec, &points, |&(p, q)| {
        let chi = SchmidtVector::from_raw_unchecked(vec![p, q, 1.0 - p - q]);
        certify_candidate(psi, phi, &chi, 1, 2, opts)
    });
    if let Some(cert) = found {
        return Ok(RecoveryOutcome::Found(Box::new(cert)));
    }
    match recover_kxk(psi, phi, 3, opts) {
        Err(RecoveryError::SearchExhausted { .. }) if region.is_empty() => {
            Err(RecoveryError::EmptyRegion)
        }
        other => other,
    }
}
