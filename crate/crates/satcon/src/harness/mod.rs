//! Scenario configuration, the end-to-end run pipeline (resolve, predict,
//! simulate, verify), bundled experiment scenarios, file export, and the
//! randomized oracle-equivalence sweep.

mod builtins;
mod export;
pub mod random;
mod scenario;
mod sweep;

pub use builtins::{
    builtin_description, builtin_names, builtin_scenario, builtin_scenarios,
    directed_experiment_graph, three_phase_schedule,
};
pub use export::{
    export_csv, export_summary, import_csv, read_csv, summary_to_json, trajectory_to_csv, CsvError,
};
pub use scenario::{parse_scenario, read_scenario, ScenarioParseError};
pub use sweep::{
    parallel_map, run_sweep, run_sweep_scenario, Regime, ScenarioOutcome, SweepConfig, SweepOutcome,
};

use crate::analysis::{
    predict_directed, predict_double, predict_fixed_undirected, predict_timevarying, verify,
    AnalysisError, DiagnosticsReport, PredictionReport,
};
use crate::dynamics::{
    mean, simulate, Model, Network, SaturationSpec, SimConfig, SimError, Trajectory,
};
use crate::graph::{Graph, GraphError, GraphSchedule};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("could not draw a connected random graph after {0} attempts")]
    RandomGraphFailed(usize),
    #[error("initial state has {got} values, expected {expected}")]
    BadInitialLength { expected: usize, got: usize },
    #[error("scenario combination is not supported: {0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Where a scenario's network comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSpec {
    Graph(Graph),
    Schedule(GraphSchedule),
    /// Seeded Erdos-Renyi draw, redrawn until connected.
    Random {
        n: usize,
        edge_prob: f64,
        weight_lo: f64,
        weight_hi: f64,
        seed: u64,
    },
}

/// Saturation levels, either one shared level or an explicit vector.
#[derive(Debug, Clone, PartialEq)]
pub enum SaturationSource {
    Homogeneous(f64),
    Levels(Vec<f64>),
}

/// Initial state source. For double-integrator scenarios the vector covers
/// positions then velocities (`2n` entries).
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Values(Vec<f64>),
    Uniform { lo: f64, hi: f64, seed: u64 },
}

/// Consensus detection parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub tol: f64,
    pub window: f64,
}

impl Default for Detection {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            window: 0.1,
        }
    }
}

/// A fully described experiment: network, saturation, initial state,
/// integration and detection settings.
///
/// `target_mean` shifts the raw initial state by a constant so that the
/// theorem condition quantity hits the requested value exactly (up to
/// rounding): the state average for single integrators, the velocity
/// average for double integrators, and the weighted average for directed
/// networks. The shift preserves the disagreement pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub network: NetworkSpec,
    pub saturation: SaturationSource,
    pub initial: InitialSpec,
    pub target_mean: Option<f64>,
    pub sim: SimConfig,
    pub detection: Detection,
}

/// A network with owned storage, after resolving any random spec.
#[derive(Debug, Clone)]
pub enum ResolvedNetwork {
    Graph(Graph),
    Schedule(GraphSchedule),
}

impl ResolvedNetwork {
    pub fn as_network(&self) -> Network<'_> {
        match self {
            ResolvedNetwork::Graph(g) => Network::Fixed(g),
            ResolvedNetwork::Schedule(s) => Network::Switching(s),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ResolvedNetwork::Graph(g) => g.n(),
            ResolvedNetwork::Schedule(s) => s.n(),
        }
    }
}

/// Everything produced by one scenario run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

/// The exportable record of a run. Wall time is kept for display but left
/// out of the serialized form, which must be byte-identical across runs of
/// the same seeded scenario.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub prediction: PredictionReport,
    pub diagnostics: DiagnosticsReport,
    pub steps: usize,
    pub dt: f64,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl Scenario {
    pub fn resolve_network(&self) -> Result<ResolvedNetwork, RunError> {
        match &self.network {
            NetworkSpec::Graph(g) => Ok(ResolvedNetwork::Graph(g.clone())),
            NetworkSpec::Schedule(s) => Ok(ResolvedNetwork::Schedule(s.clone())),
            NetworkSpec::Random {
                n,
                edge_prob,
                weight_lo,
                weight_hi,
                seed,
            } => {
                let mut rng = StdRng::seed_from_u64(*seed);
                Ok(ResolvedNetwork::Graph(random::connected_graph(
                    *n, *edge_prob, *weight_lo, *weight_hi, &mut rng,
                )?))
            }
        }
    }

    pub fn resolve_saturation(&self, n: usize) -> Result<SaturationSpec, RunError> {
        let sat = match &self.saturation {
            SaturationSource::Homogeneous(s) => SaturationSpec::homogeneous(n, *s)?,
            SaturationSource::Levels(levels) => SaturationSpec::new(levels.clone())?,
        };
        if sat.len() != n {
            return Err(RunError::BadInitialLength {
                expected: n,
                got: sat.len(),
            });
        }
        Ok(sat)
    }

    fn raw_initial(&self, dim: usize) -> Result<Vec<f64>, RunError> {
        match &self.initial {
            InitialSpec::Values(v) => {
                if v.len() != dim {
                    return Err(RunError::BadInitialLength {
                        expected: dim,
                        got: v.len(),
                    });
                }
                Ok(v.clone())
            }
            InitialSpec::Uniform { lo, hi, seed } => {
                let mut rng = StdRng::seed_from_u64(*seed);
                Ok(random::uniform_vector(dim, *lo, *hi, &mut rng))
            }
        }
    }

    /// Resolves the initial state and applies the target-mean shift against
    /// the resolved network.
    pub fn resolve_initial(&self, net: &ResolvedNetwork) -> Result<Vec<f64>, RunError> {
        let n = net.node_count();
        let dim = match self.model {
            Model::Single => n,
            Model::Double => 2 * n,
        };
        let mut x0 = self.raw_initial(dim)?;
        if let Some(target) = self.target_mean {
            match (self.model, net) {
                (Model::Single, ResolvedNetwork::Graph(g)) if g.is_directed() => {
                    let p = g.left_eigenvector()?;
                    let current: f64 = p.iter().zip(&x0).map(|(a, b)| a * b).sum();
                    let shift = target - current;
                    for v in &mut x0 {
                        *v += shift;
                    }
                }
                (Model::Single, _) => {
                    let shift = target - mean(&x0);
                    for v in &mut x0 {
                        *v += shift;
                    }
                }
                (Model::Double, _) => {
                    let (_, v0) = x0.split_at(n);
                    let shift = target - mean(v0);
                    for v in &mut x0[n..] {
                        *v += shift;
                    }
                }
            }
        }
        Ok(x0)
    }
}

/// Dispatches the applicable consensus predicate for a scenario.
pub fn predict(
    model: Model,
    x0: &[f64],
    sat: &SaturationSpec,
    net: &ResolvedNetwork,
) -> Result<PredictionReport, RunError> {
    let report = match (model, net) {
        (Model::Single, ResolvedNetwork::Graph(g)) => {
            if g.is_directed() {
                predict_directed(x0, sat, g)?
            } else {
                predict_fixed_undirected(x0, sat, g)?
            }
        }
        (Model::Single, ResolvedNetwork::Schedule(s)) => predict_timevarying(x0, sat, s)?,
        (Model::Double, ResolvedNetwork::Graph(g)) => {
            let v0 = &x0[g.n()..];
            predict_double(v0, sat, g)?
        }
        (Model::Double, ResolvedNetwork::Schedule(_)) => {
            return Err(RunError::Unsupported(
                "double-integrator agents over a switching schedule have no prediction theorem",
            ));
        }
    };
    Ok(report)
}

/// Runs a scenario end to end: resolve the network and initial state,
/// predict, simulate, verify, and assemble the summary.
pub fn run(scenario: &Scenario) -> Result<RunOutput, RunError> {
    let started = std::time::Instant::now();
    let net = scenario.resolve_network()?;
    let n = net.node_count();
    let sat = scenario.resolve_saturation(n)?;
    let x0 = scenario.resolve_initial(&net)?;
    let prediction = predict(scenario.model, &x0, &sat, &net)?;
    let trajectory = simulate(scenario.model, &x0, &net.as_network(), &sat, &scenario.sim)?;
    let diagnostics = verify(
        &trajectory,
        &prediction,
        &net.as_network(),
        &sat,
        scenario.detection.tol,
    )?;
    let summary = RunSummary {
        scenario: scenario.name.clone(),
        prediction,
        diagnostics,
        steps: trajectory.steps(),
        dt: scenario.sim.dt,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    Ok(RunOutput {
        trajectory,
        summary,
    })
}
