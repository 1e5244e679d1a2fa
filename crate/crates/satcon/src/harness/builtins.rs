//! Bundled experiment scenarios covering every regime the toolkit handles:
//! fixed undirected graphs with homogeneous and heterogeneous levels, the
//! three-phase switching network, double integrators, and the six-node
//! directed graph with its published Laplacian. Where an experiment's exact
//! graph or initial vector is not specified, a seeded random draw stands in;
//! the consensus verdicts depend only on the theorem condition, not on the
//! particular connected graph.

use super::{Detection, InitialSpec, NetworkSpec, SaturationSource, Scenario};
use crate::dynamics::{Model, SimConfig};
use crate::graph::{Graph, GraphSchedule, Segment, WeightFn};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const GRAPH50_SEED: u64 = 0x2026_0001;
const INIT50_SEED: u64 = 0x2026_0002;
const LEVELS50_SEED: u64 = 0x2026_0003;
const GRAPH10_SEED: u64 = 0x2026_0004;
const INIT10_SEED: u64 = 0x2026_0005;
const INIT4_SEED: u64 = 0x2026_0006;
const INIT6_SEED: u64 = 0x2026_0007;

/// The six-node strongly connected digraph used by the directed experiment,
/// reconstructed from its published Laplacian.
pub fn directed_experiment_graph() -> Graph {
    Graph::directed(
        6,
        &[
            (0, 1, 1.0),
            (0, 2, 3.0),
            (1, 4, 2.0),
            (2, 3, 2.0),
            (3, 4, 4.0),
            (4, 0, 1.0),
            (4, 5, 1.0),
            (5, 2, 1.0),
        ],
    )
    .expect("static graph is valid")
}

/// The four-agent switching network: one edge active per phase with
/// sinusoidal weights, period 10, disconnected at every instant yet
/// integrally connected.
pub fn three_phase_schedule() -> GraphSchedule {
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
    .expect("static schedule is valid")
}

/// Fifty heterogeneous levels on `[1, 7]` with the minimum forced to
/// exactly 1 (and unique), seeded.
fn heterogeneous_levels_50() -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(LEVELS50_SEED);
    let mut levels: Vec<f64> = (0..50).map(|_| rng.gen_range(1.0..7.0)).collect();
    let argmin = (0..50)
        .min_by(|&a, &b| levels[a].partial_cmp(&levels[b]).unwrap())
        .unwrap();
    levels[argmin] = 1.0;
    levels
}

fn network_50() -> NetworkSpec {
    NetworkSpec::Random {
        n: 50,
        edge_prob: 0.12,
        weight_lo: 0.5,
        weight_hi: 1.5,
        seed: GRAPH50_SEED,
    }
}

fn network_10() -> NetworkSpec {
    NetworkSpec::Random {
        n: 10,
        edge_prob: 0.3,
        weight_lo: 0.5,
        weight_hi: 1.5,
        seed: GRAPH10_SEED,
    }
}

fn scenario(
    name: &str,
    model: Model,
    network: NetworkSpec,
    saturation: SaturationSource,
    init_seed: u64,
    target_mean: f64,
    t_end: f64,
) -> Scenario {
    Scenario {
        name: name.into(),
        model,
        network,
        saturation,
        initial: InitialSpec::Uniform {
            lo: -10.0,
            hi: 10.0,
            seed: init_seed,
        },
        target_mean: Some(target_mean),
        sim: SimConfig::new(1e-3, t_end).expect("static config is valid"),
        detection: Detection::default(),
    }
}

/// Names of the bundled scenarios, in presentation order.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "fig2a", "fig2b", "fig3a", "fig3b", "fig5", "fig6", "fig8a", "fig8b", "fig9a", "fig9b",
        "fig11a", "fig11b",
    ]
}

/// One-line description for each bundled scenario.
pub fn builtin_description(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2a" => "50 agents, fixed graph, level 1, mean -0.9821 (consensus)",
        "fig2b" => "50 agents, fixed graph, level 1, mean 1.3060 (no consensus)",
        "fig3a" => "50 agents, fixed graph, levels in [1,7], mean -0.9821 (consensus)",
        "fig3b" => "50 agents, fixed graph, levels in [1,7], mean 1.3060 (no consensus)",
        "fig5" => "10 double integrators, velocity level 1, velocity mean -0.85 (consensus)",
        "fig6" => "10 double integrators, velocity level 1, velocity mean 1.85 (no consensus)",
        "fig8a" => "4 agents, switching network, level 1, mean -0.75 (consensus)",
        "fig8b" => "4 agents, switching network, level 1, mean 1.25 (no consensus)",
        "fig9a" => "4 agents, switching network, levels 1..4, mean -0.75 (consensus)",
        "fig9b" => "4 agents, switching network, levels 1..4, mean 1.25 (no consensus)",
        "fig11a" => "6 agents, directed graph, level 1, weighted mean 0.3455 (consensus)",
        "fig11b" => "6 agents, directed graph, level 1, weighted mean -1.8450 (no consensus)",
        _ => return None,
    })
}

/// Looks up one bundled scenario by name.
pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    let s = match name {
        "fig2a" => scenario(
            "fig2a",
            Model::Single,
            network_50(),
            SaturationSource::Homogeneous(1.0),
            INIT50_SEED,
            -0.9821,
            200.0,
        ),
        "fig2b" => scenario(
            "fig2b",
            Model::Single,
            network_50(),
            SaturationSource::Homogeneous(1.0),
            INIT50_SEED,
            1.3060,
            200.0,
        ),
        "fig3a" => scenario(
            "fig3a",
            Model::Single,
            network_50(),
            SaturationSource::Levels(heterogeneous_levels_50()),
            INIT50_SEED,
            -0.9821,
            200.0,
        ),
        "fig3b" => scenario(
            "fig3b",
            Model::Single,
            network_50(),
            SaturationSource::Levels(heterogeneous_levels_50()),
            INIT50_SEED,
            1.3060,
            300.0,
        ),
        "fig5" => scenario(
            "fig5",
            Model::Double,
            network_10(),
            SaturationSource::Homogeneous(1.0),
            INIT10_SEED,
            -0.85,
            300.0,
        ),
        "fig6" => scenario(
            "fig6",
            Model::Double,
            network_10(),
            SaturationSource::Homogeneous(1.0),
            INIT10_SEED,
            1.85,
            300.0,
        ),
        "fig8a" => scenario(
            "fig8a",
            Model::Single,
            NetworkSpec::Schedule(three_phase_schedule()),
            SaturationSource::Homogeneous(1.0),
            INIT4_SEED,
            -0.75,
            400.0,
        ),
        "fig8b" => scenario(
            "fig8b",
            Model::Single,
            NetworkSpec::Schedule(three_phase_schedule()),
            SaturationSource::Homogeneous(1.0),
            INIT4_SEED,
            1.25,
            400.0,
        ),
        "fig9a" => scenario(
            "fig9a",
            Model::Single,
            NetworkSpec::Schedule(three_phase_schedule()),
            SaturationSource::Levels(vec![1.0, 2.0, 3.0, 4.0]),
            INIT4_SEED,
            -0.75,
            400.0,
        ),
        "fig9b" => scenario(
            "fig9b",
            Model::Single,
            NetworkSpec::Schedule(three_phase_schedule()),
            SaturationSource::Levels(vec![1.0, 2.0, 3.0, 4.0]),
            INIT4_SEED,
            1.25,
            400.0,
        ),
        "fig11a" => scenario(
            "fig11a",
            Model::Single,
            NetworkSpec::Graph(directed_experiment_graph()),
            SaturationSource::Homogeneous(1.0),
            INIT6_SEED,
            0.3455,
            200.0,
        ),
        "fig11b" => scenario(
            "fig11b",
            Model::Single,
            NetworkSpec::Graph(directed_experiment_graph()),
            SaturationSource::Homogeneous(1.0),
            INIT6_SEED,
            -1.8450,
            200.0,
        ),
        _ => return None,
    };
    Some(s)
}

/// All bundled scenarios in presentation order.
pub fn builtin_scenarios() -> Vec<Scenario> {
    builtin_names()
        .into_iter()
        .map(|name| builtin_scenario(name).expect("names and builders stay in sync"))
        .collect()
}
