//! Trajectory monitors: ranking statistics, the finite-horizon consensus
//! detector, and the prediction-vs-simulation verifier with conservation,
//! Lyapunov-monotonicity and box-invariance scans.

use super::{
    lyapunov_directed, lyapunov_double, lyapunov_fixed, AnalysisError, LimitPrediction,
    PredictionReport, Theorem,
};
use crate::dynamics::{mean, Model, Network, SaturationSpec, Trajectory};
use serde::Serialize;

/// Per-step slack allowed before a Lyapunov increase counts as a violation.
const LYAPUNOV_ABS_SLACK: f64 = 1e-9;
const LYAPUNOV_REL_SLACK: f64 = 1e-6;

/// Box-invariance slack in units of the integration step.
const BOX_SLACK_STEPS: f64 = 10.0;

/// Descending order statistics of a state vector: `descending[k]` is the
/// `(k+1)`-th largest component and `prefix_sums[k]` the sum of the largest
/// `k+1`. Ties keep their original index order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankStats {
    pub order: Vec<usize>,
    pub descending: Vec<f64>,
    pub prefix_sums: Vec<f64>,
}

pub fn rank_stats(x: &[f64]) -> RankStats {
    let mut order: Vec<usize> = (0..x.len()).collect();
    // Stable sort: equal values keep ascending index order.
    order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap());
    let descending: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let mut prefix_sums = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for &v in &descending {
        acc += v;
        prefix_sums.push(acc);
    }
    RankStats {
        order,
        descending,
        prefix_sums,
    }
}

/// Finite-horizon consensus surrogate: true iff the disagreement stays below
/// `tol` at every sample in the trailing `window` fraction of the trajectory.
///
/// Double-integrator trajectories must meet the bound in both positions and
/// velocities. On success the returned value is the final position mean for
/// single integrators and the final velocity mean (the predicted group
/// decision quantity) for double integrators.
pub fn detect_consensus(
    traj: &Trajectory,
    tol: f64,
    window: f64,
) -> Result<(bool, Option<f64>), AnalysisError> {
    if traj.is_empty() {
        return Err(AnalysisError::EmptyTrajectory);
    }
    if !(tol > 0.0) {
        return Err(AnalysisError::BadTolerance(tol));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(AnalysisError::BadWindow(window));
    }
    let len = traj.len();
    let count = ((len as f64 * window).ceil() as usize).clamp(1, len);
    let start = len - count;
    let ok = (start..len).all(|k| traj.disagreement(k) < tol);
    if !ok {
        return Ok((false, None));
    }
    let value = match traj.model() {
        Model::Single => mean(traj.positions(len - 1)),
        Model::Double => mean(traj.velocities(len - 1)),
    };
    Ok((true, Some(value)))
}

/// Verdict of checking a trajectory against its prediction, plus the monitor
/// counters gathered along the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub consensus_observed: bool,
    /// Largest disagreement over the trailing assessment window (the
    /// quantity the observation verdict is defined by).
    pub final_disagreement: f64,
    pub detected_value: Option<f64>,
    /// Largest deviation of the conserved quantity (average, weighted
    /// average, or velocity average) from its initial value.
    pub average_drift: f64,
    pub lyapunov_violations: usize,
    pub worst_lyapunov_violation: f64,
    pub box_invariance_violations: usize,
    pub limit_match: Option<bool>,
    pub agreement_with_prediction: bool,
}

/// Cross-checks a simulated trajectory against its prediction report.
///
/// Agreement requires the observed verdict to equal the expected one, the
/// detected decision value (when consensus is expected) to match the
/// predicted one within `10 * tol`, and every predicted per-agent limit to be
/// met within `10 * tol`.
pub fn verify(
    traj: &Trajectory,
    report: &PredictionReport,
    net: &Network,
    sat: &SaturationSpec,
    tol: f64,
) -> Result<DiagnosticsReport, AnalysisError> {
    if traj.is_empty() {
        return Err(AnalysisError::EmptyTrajectory);
    }
    let expected_model = match report.theorem {
        Theorem::DoubleIntegrator => Model::Double,
        _ => Model::Single,
    };
    if traj.model() != expected_model {
        return Err(AnalysisError::ModelMismatch);
    }
    super::check_dims(traj.node_count(), sat.len())?;
    super::check_dims(traj.node_count(), net.node_count())?;

    let window = 0.1;
    let (consensus_observed, detected_value) = detect_consensus(traj, tol, window)?;
    let len = traj.len();
    let count = ((len as f64 * window).ceil() as usize).clamp(1, len);
    let final_disagreement = (len - count..len)
        .map(|k| traj.disagreement(k))
        .fold(0.0_f64, f64::max);

    let average_drift = conserved_drift(traj, report, net)?;
    let (lyapunov_violations, worst_lyapunov_violation) = lyapunov_scan(traj, report, net, sat)?;
    let box_invariance_violations = box_scan(traj, report, sat);

    let limit_match = report.predicted_limit.as_ref().map(|preds| {
        let last = traj.positions(len - 1);
        preds.iter().zip(last).all(|(pred, &x)| match *pred {
            LimitPrediction::Point(v) => (x - v).abs() <= 10.0 * tol,
            LimitPrediction::Interval { lo, hi } => x >= lo - 10.0 * tol && x <= hi + 10.0 * tol,
        })
    });

    let decision_ok = match (report.consensus_expected, detected_value) {
        (true, Some(found)) => (found - report.decision_value.unwrap_or(found)).abs() <= 10.0 * tol,
        _ => true,
    };
    let agreement_with_prediction = consensus_observed == report.consensus_expected
        && limit_match.unwrap_or(true)
        && decision_ok;

    Ok(DiagnosticsReport {
        consensus_observed,
        final_disagreement,
        detected_value,
        average_drift,
        lyapunov_violations,
        worst_lyapunov_violation,
        box_invariance_violations,
        limit_match,
        agreement_with_prediction,
    })
}

fn conserved_drift(
    traj: &Trajectory,
    report: &PredictionReport,
    net: &Network,
) -> Result<f64, AnalysisError> {
    let quantity: Box<dyn Fn(usize) -> f64 + '_> = match report.theorem {
        Theorem::Directed => {
            let g = match net {
                Network::Fixed(g) if g.is_directed() => g,
                _ => return Err(AnalysisError::NetworkMismatch),
            };
            let p = g.left_eigenvector()?;
            Box::new(move |k| {
                p.iter()
                    .zip(traj.positions(k))
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
        }
        Theorem::DoubleIntegrator => Box::new(|k| mean(traj.velocities(k))),
        _ => Box::new(|k| mean(traj.positions(k))),
    };
    let initial = quantity(0);
    Ok((0..traj.len())
        .map(|k| (quantity(k) - initial).abs())
        .fold(0.0, f64::max))
}

/// Counts samples where the applicable Lyapunov function increased beyond
/// slack. Only meaningful in the consensus-expected regime, where the
/// decision value is a valid potential center.
fn lyapunov_scan(
    traj: &Trajectory,
    report: &PredictionReport,
    net: &Network,
    sat: &SaturationSpec,
) -> Result<(usize, f64), AnalysisError> {
    if !report.consensus_expected {
        return Ok((0, 0.0));
    }
    let xstar = report.condition_value;
    let values: Vec<f64> = match report.theorem {
        Theorem::DoubleIntegrator => {
            let g = match net {
                Network::Fixed(g) => g,
                _ => return Err(AnalysisError::NetworkMismatch),
            };
            (0..traj.len())
                .map(|k| lyapunov_double(traj.positions(k), traj.velocities(k), g))
                .collect::<Result<_, _>>()?
        }
        Theorem::Directed => {
            let g = match net {
                Network::Fixed(g) if g.is_directed() => g,
                _ => return Err(AnalysisError::NetworkMismatch),
            };
            let p = g.left_eigenvector()?;
            (0..traj.len())
                .map(|k| lyapunov_directed(traj.positions(k), xstar, sat, &p))
                .collect::<Result<_, _>>()?
        }
        _ => (0..traj.len())
            .map(|k| lyapunov_fixed(traj.positions(k), xstar, sat))
            .collect::<Result<_, _>>()?,
    };
    let mut violations = 0;
    let mut worst = 0.0_f64;
    for w in values.windows(2) {
        let allowed = w[0] + LYAPUNOV_ABS_SLACK + LYAPUNOV_REL_SLACK * w[0];
        if w[1] > allowed {
            violations += 1;
            worst = worst.max(w[1] - allowed);
        }
    }
    Ok((violations, worst))
}

/// Positive-invariance scan of the saturation boxes along single-integrator
/// trajectories.
///
/// Homogeneous levels: each agent, once inside `[-s, s]`, must stay within
/// slack of it. Distinct heterogeneous levels: for each k, once the k agents
/// with the largest levels all lie inside the k-th box, the group must stay
/// within slack of it. Tied heterogeneous levels are not scanned (the nested
/// argument requires strict ordering).
fn box_scan(traj: &Trajectory, report: &PredictionReport, sat: &SaturationSpec) -> usize {
    if traj.model() != Model::Single {
        return 0;
    }
    if matches!(report.theorem, Theorem::Directed) {
        return 0;
    }
    let slack = BOX_SLACK_STEPS * traj.dt();
    let n = traj.node_count();
    let mut violations = 0;
    if sat.is_homogeneous() {
        let s = sat.level(0);
        for i in 0..n {
            let mut armed = false;
            for k in 0..traj.len() {
                let v = traj.positions(k)[i].abs();
                if !armed {
                    armed = v <= s;
                } else if v > s + slack {
                    violations += 1;
                }
            }
        }
        return violations;
    }
    if !sat.levels_distinct() {
        return 0;
    }
    // Agents ordered by level, largest first; boxes[k] is the level of the
    // (k+1)-th agent in that order.
    let mut by_level: Vec<usize> = (0..n).collect();
    by_level.sort_by(|&a, &b| sat.level(b).partial_cmp(&sat.level(a)).unwrap());
    let boxes: Vec<f64> = by_level.iter().map(|&i| sat.level(i)).collect();
    let mut armed = vec![false; n];
    let mut running_max = vec![0.0_f64; n];
    for k in 0..traj.len() {
        let x = traj.positions(k);
        let mut m = 0.0_f64;
        for (rank, &agent) in by_level.iter().enumerate() {
            m = m.max(x[agent].abs());
            running_max[rank] = m;
        }
        for rank in 0..n {
            if !armed[rank] {
                armed[rank] = running_max[rank] <= boxes[rank];
            } else if running_max[rank] > boxes[rank] + slack {
                violations += 1;
            }
        }
    }
    violations
}
