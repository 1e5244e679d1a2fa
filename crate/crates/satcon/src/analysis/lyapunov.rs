//! Integral Lyapunov functions in closed form.
//!
//! The building block is `int_a^b (sat(w, s) - a) dw` for `|a| <= s`, which
//! is nonnegative and vanishes only at `b = a`. It is evaluated from the
//! piecewise antiderivative, never by quadrature, so the monotonicity
//! monitors see no integration noise.

use super::AnalysisError;
use crate::dynamics::SaturationSpec;
use crate::graph::Graph;

/// `int_a^b (sat(w, s) - a) dw` for `|a| <= s`.
///
/// Three cases: entirely inside the linear region the integrand is `w - a`
/// giving `(b - a)^2 / 2`; past the upper level the tail integrand is the
/// constant `s - a`; symmetrically past the lower level.
pub fn saturation_integral(a: f64, b: f64, s: f64) -> f64 {
    debug_assert!(a.abs() <= s);
    if b > s {
        0.5 * (s - a) * (s - a) + (s - a) * (b - s)
    } else if b < -s {
        0.5 * (s + a) * (s + a) + (s + a) * (-b - s)
    } else {
        0.5 * (b - a) * (b - a)
    }
}

fn check_decision(xstar: f64, sat: &SaturationSpec) -> Result<(), AnalysisError> {
    let min_level = sat.min_level();
    if xstar.abs() > min_level {
        return Err(AnalysisError::DecisionOutOfRange { xstar, min_level });
    }
    Ok(())
}

/// `V(x) = 2 sum_i int_{x*}^{x_i} (sat_i(w) - x*) dw`, the potential that
/// decreases along undirected saturated consensus trajectories whenever
/// `|x*|` is within every saturation level. Zero exactly at `x = x* 1`.
pub fn lyapunov_fixed(x: &[f64], xstar: f64, sat: &SaturationSpec) -> Result<f64, AnalysisError> {
    super::check_dims(sat.len(), x.len())?;
    check_decision(xstar, sat)?;
    let mut acc = 0.0;
    for (&xi, &s) in x.iter().zip(sat.levels()) {
        acc += saturation_integral(xstar, xi, s);
    }
    Ok(2.0 * acc)
}

/// Weighted variant for strongly connected digraphs:
/// `V(x) = 2 sum_i p_i int_{x*}^{x_i} (sat_i(w) - x*) dw` with `p > 0`.
pub fn lyapunov_directed(
    x: &[f64],
    xstar: f64,
    sat: &SaturationSpec,
    p: &[f64],
) -> Result<f64, AnalysisError> {
    super::check_dims(sat.len(), x.len())?;
    super::check_dims(sat.len(), p.len())?;
    if p.iter().any(|&v| !(v > 0.0)) {
        return Err(AnalysisError::NonPositiveWeights);
    }
    check_decision(xstar, sat)?;
    let mut acc = 0.0;
    for ((&xi, &s), &pi) in x.iter().zip(sat.levels()).zip(p) {
        acc += pi * saturation_integral(xstar, xi, s);
    }
    Ok(2.0 * acc)
}

/// Double-integrator potential over an undirected graph:
/// `V = 1/2 sum_ij a_ij (x_i - x_j)^2 + sum_i v_i^2`.
pub fn lyapunov_double(x: &[f64], v: &[f64], g: &Graph) -> Result<f64, AnalysisError> {
    if g.is_directed() {
        return Err(AnalysisError::DirectedInput);
    }
    super::check_dims(g.n(), x.len())?;
    super::check_dims(g.n(), v.len())?;
    let n = g.n();
    let w = g.weights();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = x[i] - x[j];
            acc += w[i * n + j] * d * d;
        }
    }
    Ok(0.5 * acc + v.iter().map(|&vi| vi * vi).sum::<f64>())
}
