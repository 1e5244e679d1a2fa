//! Randomized checks of the algebraic identities the convergence arguments
//! rest on: the undirected and weighted-directed double-sum identities, the
//! sign of the saturation integral, and incremental passivity.

use super::{saturation_integral, AnalysisError};
use crate::dynamics::saturate;
use crate::graph::{simpson, Graph};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

const REL_TOL: f64 = 1e-10;
const QUADRATURE_TOL: f64 = 1e-8;
const MAX_COUNTEREXAMPLES: usize = 10;

/// Tally of identity checks over random draws; all failure counts are
/// expected to be zero.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub undirected_identity_failures: usize,
    pub directed_identity_failures: usize,
    pub integral_sign_failures: usize,
    pub quadrature_mismatches: usize,
    pub passivity_failures: usize,
    pub worst_relative_error: f64,
    pub counterexamples: Vec<String>,
}

impl IdentityReport {
    pub fn total_failures(&self) -> usize {
        self.undirected_identity_failures
            + self.directed_identity_failures
            + self.integral_sign_failures
            + self.quadrature_mismatches
            + self.passivity_failures
    }

    fn note(&mut self, line: String) {
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(line);
        }
    }
}

/// Draws `samples` random vectors and checks, against `g`:
/// the undirected identity
/// `sum_ij a_ij (u_i - u_j)(w_i - w_j) = 2 sum_ij a_ij u_i (w_i - w_j)`
/// (or, for directed strongly connected graphs, the weighted identity
/// `2 sum_ij p_i a_ij y_i (y_i - y_j) = sum_ij p_i a_ij (y_i - y_j)^2`),
/// plus the nonnegativity of the saturation integral with its quadrature
/// cross-check and the incremental passivity of the saturation map.
pub fn verify_proof_identities(
    g: &Graph,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport, AnalysisError> {
    let n = g.n();
    let p = if g.is_directed() {
        Some(g.left_eigenvector()?)
    } else {
        None
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = IdentityReport {
        samples,
        undirected_identity_failures: 0,
        directed_identity_failures: 0,
        integral_sign_failures: 0,
        quadrature_mismatches: 0,
        passivity_failures: 0,
        worst_relative_error: 0.0,
        counterexamples: Vec::new(),
    };
    let w = g.weights();
    for _ in 0..samples {
        match &p {
            None => {
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let mut lhs = 0.0;
                let mut rhs = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let wij = w[i * n + j];
                        lhs += wij * (a[i] - a[j]) * (b[i] - b[j]);
                        rhs += 2.0 * wij * a[i] * (b[i] - b[j]);
                    }
                }
                let rel = relative_gap(lhs, rhs);
                report.worst_relative_error = report.worst_relative_error.max(rel);
                if rel > REL_TOL {
                    report.undirected_identity_failures += 1;
                    report.note(format!("undirected identity: a={a:?} b={b:?} gap={rel:e}"));
                }
            }
            Some(p) => {
                let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let mut lhs = 0.0;
                let mut rhs = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let c = p[i] * w[i * n + j];
                        let d = y[i] - y[j];
                        lhs += 2.0 * c * y[i] * d;
                        rhs += c * d * d;
                    }
                }
                let rel = relative_gap(lhs, rhs);
                report.worst_relative_error = report.worst_relative_error.max(rel);
                if rel > REL_TOL {
                    report.directed_identity_failures += 1;
                    report.note(format!("directed identity: y={y:?} gap={rel:e}"));
                }
            }
        }

        // Saturation integral sign and closed-form/quadrature agreement.
        let s = rng.gen_range(0.5..5.0);
        let a = rng.gen_range(-s..s);
        let b = rng.gen_range(-10.0..10.0);
        let closed = saturation_integral(a, b, s);
        if closed < 0.0 || (a != b && closed <= 0.0) {
            report.integral_sign_failures += 1;
            report.note(format!("integral sign: a={a} b={b} s={s} value={closed}"));
        }
        let quad = kink_split_quadrature(a, b, s);
        if (closed - quad).abs() > QUADRATURE_TOL * closed.abs().max(1.0) {
            report.quadrature_mismatches += 1;
            report.note(format!(
                "quadrature: a={a} b={b} s={s} closed={closed} quad={quad}"
            ));
        }

        // Incremental passivity of the saturation map.
        let u = rng.gen_range(-10.0..10.0);
        let v = rng.gen_range(-10.0..10.0);
        if (u - v) * (saturate(u, s) - saturate(v, s)) < 0.0 {
            report.passivity_failures += 1;
            report.note(format!("passivity: u={u} v={v} s={s}"));
        }
    }
    Ok(report)
}

fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

/// `int_a^b (sat(w, s) - a) dw` by Simpson quadrature, split at the
/// saturation kinks so each piece is polynomial and the rule is exact up to
/// rounding.
fn kink_split_quadrature(a: f64, b: f64, s: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut cuts = vec![lo];
    for kink in [-s, s] {
        if kink > lo && kink < hi {
            cuts.push(kink);
        }
    }
    cuts.push(hi);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += simpson(|t| saturate(t, s) - a, pair[0], pair[1], 100);
    }
    if a <= b {
        total
    } else {
        -total
    }
}
