//! Consensus predicates, equilibrium prediction and trajectory verification.
//!
//! The central objects are the exact domain-of-attraction conditions: over a
//! connected undirected graph (fixed or integrally connected time-varying)
//! the saturated consensus dynamics reach agreement if and only if the
//! initial state average lies within the smallest saturation level; over a
//! strongly connected digraph the same holds for the weighted average taken
//! with the positive left null vector of the Laplacian. When the condition
//! fails the limits are still predictable in part, and every prediction here
//! can be checked against a simulated trajectory.

mod damped;
mod identities;
mod lyapunov;
mod monitors;

pub use damped::{damped_consensus_check, DampedReport};
pub use identities::{verify_proof_identities, IdentityReport};
pub use lyapunov::{lyapunov_directed, lyapunov_double, lyapunov_fixed, saturation_integral};
pub use monitors::{detect_consensus, rank_stats, verify, DiagnosticsReport, RankStats};

use crate::dynamics::{mean, SaturationSpec, SimError};
use crate::graph::{Graph, GraphError, GraphSchedule, DEFAULT_INTEGRAL_EPS};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("predicate requires an undirected graph")]
    DirectedInput,
    #[error("predicate requires a directed graph")]
    UndirectedInput,
    #[error("graph is not connected")]
    NotConnected,
    #[error("schedule is not integrally connected; integral-graph components: {components:?}")]
    NotIntegrallyConnected { components: Vec<Vec<usize>> },
    #[error("time-varying prediction requires a symmetric schedule")]
    NonSymmetricSchedule,
    #[error(
        "heterogeneous time-varying prediction requires every active weight bounded away \
         from zero; the smallest active lower bound is {0}"
    )]
    WeightsNotBoundedAway(f64),
    #[error("vector has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("homogeneous saturation levels required")]
    HeterogeneousLevels,
    #[error("|x*| = {xstar} exceeds the minimum saturation level {min_level}")]
    DecisionOutOfRange { xstar: f64, min_level: f64 },
    #[error("weight vector must be strictly positive")]
    NonPositiveWeights,
    #[error("trajectory has no samples")]
    EmptyTrajectory,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("window fraction must lie in (0, 1], got {0}")]
    BadWindow(f64),
    #[error("trajectory model does not match the prediction report")]
    ModelMismatch,
    #[error("network kind does not match the prediction report")]
    NetworkMismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Which consensus theorem produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    FixedUndirected,
    TimeVaryingHomogeneous,
    TimeVaryingHeterogeneous,
    DoubleIntegrator,
    Directed,
}

/// Predicted asymptotic value of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LimitPrediction {
    Point(f64),
    Interval { lo: f64, hi: f64 },
}

/// Outcome of a consensus predicate: the tested condition value, the
/// threshold it is compared against, and — where the theory gives one — the
/// group decision value or the predicted limit of each agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub theorem: Theorem,
    pub consensus_expected: bool,
    pub condition_value: f64,
    pub threshold: f64,
    pub decision_value: Option<f64>,
    pub predicted_limit: Option<Vec<LimitPrediction>>,
}

impl PredictionReport {
    fn new(
        theorem: Theorem,
        condition_value: f64,
        threshold: f64,
        predicted_limit: Option<Vec<LimitPrediction>>,
    ) -> Self {
        let consensus_expected = condition_value.abs() <= threshold;
        Self {
            theorem,
            consensus_expected,
            condition_value,
            threshold,
            decision_value: consensus_expected.then_some(condition_value),
            predicted_limit: if consensus_expected {
                None
            } else {
                predicted_limit
            },
        }
    }
}

fn check_dims(expected: usize, got: usize) -> Result<(), AnalysisError> {
    if expected == got {
        Ok(())
    } else {
        Err(AnalysisError::DimensionMismatch { expected, got })
    }
}

/// Fixed undirected connected graph: consensus iff `|mean(x0)| <= min_i s_i`.
///
/// When the condition fails, the reachable equilibrium is predicted: with
/// distinct heterogeneous levels every agent except the one with the smallest
/// level converges to that level and the smallest-level agent absorbs the
/// surplus dictated by average invariance; with homogeneous levels the agents
/// that start inside the saturation box converge to the level exactly and the
/// rest are bounded by the initial extremes.
pub fn predict_fixed_undirected(
    x0: &[f64],
    sat: &SaturationSpec,
    g: &Graph,
) -> Result<PredictionReport, AnalysisError> {
    if g.is_directed() {
        return Err(AnalysisError::DirectedInput);
    }
    if !g.is_connected()? {
        return Err(AnalysisError::NotConnected);
    }
    check_dims(g.n(), x0.len())?;
    check_dims(g.n(), sat.len())?;
    let condition = mean(x0);
    let threshold = sat.min_level();
    Ok(PredictionReport::new(
        Theorem::FixedUndirected,
        condition,
        threshold,
        Some(unachievable_limit(x0, sat, condition)),
    ))
}

/// Integrally connected symmetric switching schedule: the same average
/// condition as the fixed case. Heterogeneous levels additionally require
/// every active weight to be bounded away from zero.
pub fn predict_timevarying(
    x0: &[f64],
    sat: &SaturationSpec,
    sched: &GraphSchedule,
) -> Result<PredictionReport, AnalysisError> {
    if !sched.is_symmetric() {
        return Err(AnalysisError::NonSymmetricSchedule);
    }
    check_dims(sched.n(), x0.len())?;
    check_dims(sched.n(), sat.len())?;
    let integral = sched.integral_graph(DEFAULT_INTEGRAL_EPS)?;
    if !integral.is_connected()? {
        return Err(AnalysisError::NotIntegrallyConnected {
            components: integral.connected_components()?,
        });
    }
    let homogeneous = sat.is_homogeneous();
    if !homogeneous {
        let min_active = sched.min_active_weight();
        if !(min_active > 0.0) {
            return Err(AnalysisError::WeightsNotBoundedAway(min_active));
        }
    }
    let theorem = if homogeneous {
        Theorem::TimeVaryingHomogeneous
    } else {
        Theorem::TimeVaryingHeterogeneous
    };
    let condition = mean(x0);
    let threshold = sat.min_level();
    Ok(PredictionReport::new(
        theorem,
        condition,
        threshold,
        Some(unachievable_limit(x0, sat, condition)),
    ))
}

/// Double integrators with homogeneous velocity saturation over a fixed
/// undirected connected graph: consensus iff `|mean(v0)| <= s`; positions are
/// unconstrained.
pub fn predict_double(
    v0: &[f64],
    sat: &SaturationSpec,
    g: &Graph,
) -> Result<PredictionReport, AnalysisError> {
    if g.is_directed() {
        return Err(AnalysisError::DirectedInput);
    }
    if !g.is_connected()? {
        return Err(AnalysisError::NotConnected);
    }
    if !sat.is_homogeneous() {
        return Err(AnalysisError::HeterogeneousLevels);
    }
    check_dims(g.n(), v0.len())?;
    check_dims(g.n(), sat.len())?;
    Ok(PredictionReport::new(
        Theorem::DoubleIntegrator,
        mean(v0),
        sat.level(0),
        None,
    ))
}

/// Strongly connected digraph: consensus iff `|p^T x0| <= min_i s_i` where
/// `p` is the positive left null vector of the Laplacian.
pub fn predict_directed(
    x0: &[f64],
    sat: &SaturationSpec,
    g: &Graph,
) -> Result<PredictionReport, AnalysisError> {
    if !g.is_directed() {
        return Err(AnalysisError::UndirectedInput);
    }
    check_dims(g.n(), x0.len())?;
    check_dims(g.n(), sat.len())?;
    let p = g.left_eigenvector()?;
    let condition = p.iter().zip(x0).map(|(a, b)| a * b).sum::<f64>();
    Ok(PredictionReport::new(
        Theorem::Directed,
        condition,
        sat.min_level(),
        None,
    ))
}

/// Per-agent limit prediction for a failed average condition, single
/// integrators over undirected networks.
fn unachievable_limit(x0: &[f64], sat: &SaturationSpec, condition: f64) -> Vec<LimitPrediction> {
    let n = x0.len();
    let s_min = sat.min_level();
    let total: f64 = x0.iter().sum();
    let positive = condition > 0.0;
    if !sat.is_homogeneous() && sat.levels_distinct() {
        // The unique smallest-level agent keeps the surplus; everyone else
        // lands exactly on the smallest level.
        let argmin = (0..n)
            .min_by(|&a, &b| sat.level(a).partial_cmp(&sat.level(b)).unwrap())
            .unwrap();
        let escape = if positive {
            total - (n as f64 - 1.0) * s_min
        } else {
            total + (n as f64 - 1.0) * s_min
        };
        let pinned = if positive { s_min } else { -s_min };
        (0..n)
            .map(|i| {
                if i == argmin {
                    LimitPrediction::Point(escape)
                } else {
                    LimitPrediction::Point(pinned)
                }
            })
            .collect()
    } else {
        // Homogeneous levels, or heterogeneous levels with ties (for which
        // the strict-ordering analysis does not apply): agents starting
        // inside the smallest box converge to its boundary, the rest only get
        // interval bounds from the initial extremes.
        if positive {
            let hi = x0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            x0.iter()
                .map(|&xi| {
                    if xi <= s_min {
                        LimitPrediction::Point(s_min)
                    } else {
                        LimitPrediction::Interval { lo: s_min, hi }
                    }
                })
                .collect()
        } else {
            let lo = x0.iter().cloned().fold(f64::INFINITY, f64::min);
            x0.iter()
                .map(|&xi| {
                    if xi >= -s_min {
                        LimitPrediction::Point(-s_min)
                    } else {
                        LimitPrediction::Interval { lo, hi: -s_min }
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Segment, WeightFn};

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Graph::undirected(n, &edges).unwrap()
    }

    fn three_phase_schedule() -> GraphSchedule {
        GraphSchedule::periodic(
            4,
            vec![
                Segment::new(
                    0.0,
                    3.0,
                    vec![(0, 1, WeightFn::new(3.0, 1.0, 0.0).unwrap())],
                ),
                Segment::new(
                    3.0,
                    6.0,
                    vec![(0, 2, WeightFn::new(2.0, 0.0, -1.0).unwrap())],
                ),
                Segment::new(
                    6.0,
                    10.0,
                    vec![(1, 3, WeightFn::new(1.5, -1.0, 0.0).unwrap())],
                ),
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn fixed_prediction_inside_domain() {
        let g = path_graph(4);
        let sat = SaturationSpec::homogeneous(4, 1.0).unwrap();
        let x0 = [-2.0, 1.0, -1.5, -1.4284];
        let r = predict_fixed_undirected(&x0, &sat, &g).unwrap();
        assert!(r.consensus_expected);
        assert_eq!(r.decision_value, Some(r.condition_value));
        assert!(r.predicted_limit.is_none());
        assert_eq!(r.theorem, Theorem::FixedUndirected);
    }

    #[test]
    fn fixed_prediction_outside_domain_homogeneous() {
        let g = path_graph(3);
        let sat = SaturationSpec::homogeneous(3, 1.0).unwrap();
        let x0 = [0.5, 4.0, 2.5];
        let r = predict_fixed_undirected(&x0, &sat, &g).unwrap();
        assert!(!r.consensus_expected);
        assert_eq!(r.decision_value, None);
        let limit = r.predicted_limit.unwrap();
        assert_eq!(limit[0], LimitPrediction::Point(1.0));
        assert_eq!(limit[1], LimitPrediction::Interval { lo: 1.0, hi: 4.0 });
        assert_eq!(limit[2], LimitPrediction::Interval { lo: 1.0, hi: 4.0 });
    }

    #[test]
    fn fixed_prediction_heterogeneous_closed_form() {
        let g = path_graph(3);
        let sat = SaturationSpec::new(vec![3.0, 2.0, 1.0]).unwrap();
        let x0 = [4.0, 3.0, 2.0];
        let r = predict_fixed_undirected(&x0, &sat, &g).unwrap();
        assert!(!r.consensus_expected);
        let limit = r.predicted_limit.unwrap();
        assert_eq!(limit[0], LimitPrediction::Point(1.0));
        assert_eq!(limit[1], LimitPrediction::Point(1.0));
        assert_eq!(limit[2], LimitPrediction::Point(7.0));
    }

    #[test]
    fn fixed_prediction_heterogeneous_negative_side() {
        let g = path_graph(3);
        let sat = SaturationSpec::new(vec![3.0, 2.0, 1.0]).unwrap();
        let x0 = [-4.0, -3.0, -2.0];
        let r = predict_fixed_undirected(&x0, &sat, &g).unwrap();
        assert!(!r.consensus_expected);
        let limit = r.predicted_limit.unwrap();
        assert_eq!(limit[0], LimitPrediction::Point(-1.0));
        assert_eq!(limit[1], LimitPrediction::Point(-1.0));
        assert_eq!(limit[2], LimitPrediction::Point(-7.0));
    }

    #[test]
    fn fixed_prediction_rejects_disconnected() {
        let g = Graph::undirected(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let sat = SaturationSpec::homogeneous(4, 1.0).unwrap();
        assert!(matches!(
            predict_fixed_undirected(&[0.0; 4], &sat, &g),
            Err(AnalysisError::NotConnected)
        ));
    }

    #[test]
    fn timevarying_prediction_inside_domain() {
        let sched = three_phase_schedule();
        let sat = SaturationSpec::homogeneous(4, 1.0).unwrap();
        let x0 = [-3.0, 2.0, -1.0, -1.0];
        let r = predict_timevarying(&x0, &sat, &sched).unwrap();
        assert!(r.consensus_expected);
        assert_eq!(r.theorem, Theorem::TimeVaryingHomogeneous);
        assert!((r.condition_value + 0.75).abs() < 1e-15);
    }

    #[test]
    fn timevarying_prediction_heterogeneous_threshold() {
        let sched = three_phase_schedule();
        let sat = SaturationSpec::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let x0 = [-3.0, 2.0, -1.0, -1.0];
        let r = predict_timevarying(&x0, &sat, &sched).unwrap();
        assert!(r.consensus_expected);
        assert_eq!(r.theorem, Theorem::TimeVaryingHeterogeneous);
        assert_eq!(r.threshold, 1.0);
    }

    #[test]
    fn timevarying_prediction_rejects_disconnected_integral_graph() {
        let sched = GraphSchedule::periodic(
            4,
            vec![Segment::new(
                0.0,
                2.0,
                vec![
                    (0, 1, WeightFn::constant(1.0).unwrap()),
                    (2, 3, WeightFn::constant(1.0).unwrap()),
                ],
            )],
            true,
        )
        .unwrap();
        let sat = SaturationSpec::homogeneous(4, 1.0).unwrap();
        match predict_timevarying(&[0.0; 4], &sat, &sched) {
            Err(AnalysisError::NotIntegrallyConnected { components }) => {
                assert_eq!(components, vec![vec![0, 1], vec![2, 3]]);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn double_prediction_boundary_is_inclusive() {
        let g = path_graph(3);
        let sat = SaturationSpec::homogeneous(3, 1.0).unwrap();
        let r = predict_double(&[1.0, 1.0, 1.0], &sat, &g).unwrap();
        assert!(r.consensus_expected);
        let r2 = predict_double(&[1.0, 1.0, 1.0 + 1e-9], &sat, &g).unwrap();
        assert!(!r2.consensus_expected);
    }

    #[test]
    fn double_prediction_rejects_heterogeneous() {
        let g = path_graph(2);
        let sat = SaturationSpec::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            predict_double(&[0.0, 0.0], &sat, &g),
            Err(AnalysisError::HeterogeneousLevels)
        ));
    }

    #[test]
    fn directed_prediction_consensus_value_on_agreement() {
        let g = crate::graph::tests::six_node_digraph();
        let sat = SaturationSpec::homogeneous(6, 1.0).unwrap();
        let c = 0.37;
        let x0 = [c; 6];
        let r = predict_directed(&x0, &sat, &g).unwrap();
        assert!((r.condition_value - c).abs() < 1e-12);
        assert!(r.consensus_expected);
    }

    #[test]
    fn prediction_is_deterministic() {
        let g = path_graph(5);
        let sat = SaturationSpec::new(vec![2.0, 1.5, 3.0, 1.0, 2.5]).unwrap();
        let x0 = [3.3, -1.2, 8.8, 0.2, 4.9];
        let a = predict_fixed_undirected(&x0, &sat, &g).unwrap();
        let b = predict_fixed_undirected(&x0, &sat, &g).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_vec(&a).unwrap(),
            serde_json::to_vec(&b).unwrap()
        );
    }
}
