//! Property tests for the algebraic and dynamical invariants: saturation
//! symmetry and passivity, Laplacian structure, schedule periodicity,
//! ranking statistics, and the conservation/monotonicity laws along
//! simulated trajectories.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use satcon::analysis::{lyapunov_fixed, rank_stats, saturation_integral};
use satcon::dynamics::{
    mean, saturate, simulate, Method, Model, Network, SaturationSpec, SimConfig,
};
use satcon::graph::{simpson, Graph, GraphSchedule, Segment, WeightFn};
use satcon::harness::random::connected_graph;
use satcon::harness::{directed_experiment_graph, three_phase_schedule};

fn positive_level() -> impl Strategy<Value = f64> {
    0.1f64..10.0
}

proptest! {
    #[test]
    fn saturate_is_odd(x in -50.0f64..50.0, s in positive_level()) {
        prop_assert_eq!(saturate(-x, s), -saturate(x, s));
    }

    #[test]
    fn saturate_is_incrementally_passive(
        u in -50.0f64..50.0,
        v in -50.0f64..50.0,
        s in positive_level(),
    ) {
        prop_assert!((u - v) * (saturate(u, s) - saturate(v, s)) >= 0.0);
    }

    #[test]
    fn saturate_is_nondecreasing(
        u in -50.0f64..50.0,
        v in -50.0f64..50.0,
        s in positive_level(),
    ) {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        prop_assert!(saturate(lo, s) <= saturate(hi, s));
    }

    #[test]
    fn saturation_integral_is_nonnegative_and_definite(
        a_frac in -1.0f64..1.0,
        b in -20.0f64..20.0,
        s in positive_level(),
    ) {
        let a = a_frac * s;
        let value = saturation_integral(a, b, s);
        prop_assert!(value >= 0.0);
        if a != b {
            prop_assert!(value > 0.0);
        } else {
            prop_assert_eq!(value, 0.0);
        }
    }

    #[test]
    fn saturation_integral_matches_kink_split_quadrature(
        a_frac in -1.0f64..1.0,
        b in -20.0f64..20.0,
        s in positive_level(),
    ) {
        let a = a_frac * s;
        let closed = saturation_integral(a, b, s);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut cuts = vec![lo];
        for kink in [-s, s] {
            if kink > lo && kink < hi {
                cuts.push(kink);
            }
        }
        cuts.push(hi);
        let mut quad = 0.0;
        for w in cuts.windows(2) {
            quad += simpson(|t| saturate(t, s) - a, w[0], w[1], 64);
        }
        if a > b {
            quad = -quad;
        }
        prop_assert!((closed - quad).abs() <= 1e-8 * closed.abs().max(1.0));
    }

    #[test]
    fn laplacian_rows_sum_to_zero(seed in 0u64..1000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = connected_graph(7, 0.5, 0.1, 3.0, &mut rng).unwrap();
        for s in g.laplacian().row_sums() {
            prop_assert_eq!(s, 0.0);
        }
    }

    /// Search connectivity and the spectral gap are independent routes to
    /// the same answer.
    #[test]
    fn connectivity_matches_spectral_gap(seed in 0u64..500, n in 2usize..12) {
        use rand::Rng;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.25) {
                    edges.push((i, j, rng.gen_range(0.2..2.0)));
                }
            }
        }
        let g = Graph::undirected(n, &edges).unwrap();
        let spectrum = g.laplacian_spectrum().unwrap();
        prop_assert!(spectrum[0].abs() <= 1e-10);
        let connected = g.is_connected().unwrap();
        prop_assert_eq!(connected, spectrum[1] > 1e-8);
    }

    #[test]
    fn undirected_double_sum_identity(seed in 0u64..1000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = connected_graph(6, 0.5, 0.1, 2.0, &mut rng).unwrap();
        let draw = |rng: &mut StdRng| -> Vec<f64> {
            use rand::Rng;
            (0..6).map(|_| rng.gen_range(-5.0..5.0)).collect()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let w = g.weights();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                lhs += w[i * 6 + j] * (a[i] - a[j]) * (b[i] - b[j]);
                rhs += 2.0 * w[i * 6 + j] * a[i] * (b[i] - b[j]);
            }
        }
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1.0));
    }

    #[test]
    fn schedule_weights_are_periodic(k in 0u32..200) {
        // Dyadic sample times make the period reduction exact.
        let s = three_phase_schedule();
        let t = k as f64 * 0.0625;
        prop_assert_eq!(s.weights_at(t).unwrap(), s.weights_at(t + 10.0).unwrap());
        prop_assert_eq!(s.weights_at(t).unwrap(), s.weights_at(t + 20.0).unwrap());
    }

    #[test]
    fn integral_graph_monotone_in_eps(e1 in 1e-9f64..20.0, e2 in 1e-9f64..20.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let s = three_phase_schedule();
        let g_lo = s.integral_graph(lo).unwrap();
        let g_hi = s.integral_graph(hi).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!(g_hi.weight(i, j) <= g_lo.weight(i, j));
            }
        }
    }

    #[test]
    fn rank_stats_matches_naive_sort(values in proptest::collection::vec(-100.0f64..100.0, 1..40)) {
        let r = rank_stats(&values);
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        prop_assert_eq!(&r.descending, &sorted);
        let total: f64 = r.prefix_sums.last().copied().unwrap();
        let direct: f64 = r.descending.iter().sum();
        prop_assert!((total - direct).abs() < 1e-12);
        // The order is a permutation.
        let mut order = r.order.clone();
        order.sort_unstable();
        prop_assert_eq!(order, (0..values.len()).collect::<Vec<_>>());
    }
}

fn fixed_net(seed: u64, n: usize) -> Graph {
    let mut rng = StdRng::seed_from_u64(seed);
    connected_graph(n, 0.4, 0.5, 1.5, &mut rng).unwrap()
}

fn uniform(seed: u64, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = StdRng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
}

/// The conservation laws hold at the coarse step the contract names.
#[test]
fn average_invariance_along_trajectories() {
    let g = fixed_net(21, 12);
    let sat = SaturationSpec::homogeneous(12, 1.0).unwrap();
    let x0 = uniform(22, 12, -10.0, 10.0);
    let cfg = SimConfig::new(1e-2, 200.0).unwrap();
    let traj = simulate(Model::Single, &x0, &Network::Fixed(&g), &sat, &cfg).unwrap();
    let m0 = mean(traj.positions(0));
    for k in 0..traj.len() {
        assert!((mean(traj.positions(k)) - m0).abs() <= 1e-6);
    }
}

#[test]
fn weighted_average_invariance_along_directed_trajectories() {
    let g = directed_experiment_graph();
    let p = g.left_eigenvector().unwrap();
    let sat = SaturationSpec::homogeneous(6, 1.0).unwrap();
    let x0 = uniform(23, 6, -10.0, 10.0);
    let cfg = SimConfig::new(1e-2, 200.0).unwrap();
    let traj = simulate(Model::Single, &x0, &Network::Fixed(&g), &sat, &cfg).unwrap();
    let w = |k: usize| -> f64 {
        p.iter()
            .zip(traj.positions(k))
            .map(|(a, b)| a * b)
            .sum::<f64>()
    };
    let w0 = w(0);
    for k in 0..traj.len() {
        assert!((w(k) - w0).abs() <= 1e-6);
    }
}

#[test]
fn velocity_average_invariance_for_double_integrators() {
    let g = fixed_net(24, 8);
    let sat = SaturationSpec::homogeneous(8, 1.0).unwrap();
    let x0 = uniform(25, 16, -10.0, 10.0);
    let cfg = SimConfig::new(1e-2, 200.0).unwrap();
    let traj = simulate(Model::Double, &x0, &Network::Fixed(&g), &sat, &cfg).unwrap();
    let v0 = mean(traj.velocities(0));
    for k in 0..traj.len() {
        assert!((mean(traj.velocities(k)) - v0).abs() <= 1e-6);
    }
}

/// Extremes contract and prefix sums decay for homogeneous agents.
#[test]
fn homogeneous_rank_statistics_are_monotone() {
    let g = fixed_net(26, 9);
    let sat = SaturationSpec::homogeneous(9, 1.0).unwrap();
    let x0 = uniform(27, 9, -10.0, 10.0);
    let cfg = SimConfig::new(1e-3, 100.0).unwrap();
    let traj = simulate(Model::Single, &x0, &Network::Fixed(&g), &sat, &cfg).unwrap();
    let slack = 1e-9;
    let mut prev = rank_stats(traj.positions(0));
    let n_mean = 9.0 * mean(traj.positions(0));
    for k in 1..traj.len() {
        let cur = rank_stats(traj.positions(k));
        // Max nonincreasing, min nondecreasing.
        assert!(cur.descending[0] <= prev.descending[0] + slack);
        assert!(cur.descending[8] >= prev.descending[8] - slack);
        // Every prefix sum nonincreasing, and the full sum conserved.
        for m in 0..8 {
            assert!(cur.prefix_sums[m] <= prev.prefix_sums[m] + slack);
        }
        assert!((cur.prefix_sums[8] - n_mean).abs() <= 1e-8);
        prev = cur;
    }
}

/// Once every member of the k-largest-level group is inside the k-th box,
/// the group never leaves it (up to integration slack).
#[test]
fn heterogeneous_box_invariance_along_trajectory() {
    let g = fixed_net(28, 5);
    let levels = vec![4.0, 3.0, 2.2, 1.4, 0.9];
    let sat = SaturationSpec::new(levels.clone()).unwrap();
    let x0 = uniform(29, 5, -10.0, 10.0);
    let cfg = SimConfig::new(1e-3, 150.0).unwrap();
    let traj = simulate(Model::Single, &x0, &Network::Fixed(&g), &sat, &cfg).unwrap();
    let slack = 10.0 * traj.dt();
    for k_group in 1..=5usize {
        let box_level = levels[k_group - 1];
        let mut armed = false;
        for k in 0..traj.len() {
            let m = traj.positions(k)[..k_group]
                .iter()
                .fold(0.0_f64, |a, &v| a.max(v.abs()));
            if !armed {
                armed = m <= box_level;
            } else {
                assert!(
                    m <= box_level + slack,
                    "group {k_group} left its box at sample {k}: {m} > {box_level}"
                );
            }
        }
    }
}

/// Euler converges at first order on a smooth (unsaturated) consensus run,
/// and RK4 is far more accurate at the same step.
#[test]
fn euler_order_of_accuracy_cross_check() {
    let g = fixed_net(30, 6);
    let sat = SaturationSpec::homogeneous(6, 5.0).unwrap();
    // Everything inside the linear region: the dynamics are smooth.
    let x0 = uniform(31, 6, -2.0, 2.0);
    let run = |method: Method, dt: f64| {
        let cfg = SimConfig::new(dt, 5.0).unwrap().with_method(method);
        simulate(Model::Single, &x0, &Network::Fixed(&g), &sat, &cfg).unwrap()
    };
    let reference = run(Method::Rk4, 1e-4);
    let err = |traj: &satcon::dynamics::Trajectory| {
        traj.last_state()
            .iter()
            .zip(reference.last_state())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max)
    };
    let e1 = err(&run(Method::Euler, 2e-2));
    let e2 = err(&run(Method::Euler, 1e-2));
    let ratio = e1 / e2;
    assert!(
        (1.5..3.0).contains(&ratio),
        "halving dt should roughly halve the Euler error, ratio {ratio}"
    );
    let rk4 = err(&run(Method::Rk4, 1e-2));
    assert!(rk4 < e2 * 1e-3, "rk4 error {rk4} vs euler {e2}");
}

/// Lyapunov potential decreases along consensus-bound runs, including over
/// the switching schedule.
#[test]
fn lyapunov_descent_over_switching_schedule() {
    let sched = three_phase_schedule();
    let sat = SaturationSpec::homogeneous(4, 1.0).unwrap();
    let x0 = {
        let mut v = uniform(32, 4, -10.0, 10.0);
        let shift = -0.75 - mean(&v);
        for x in &mut v {
            *x += shift;
        }
        v
    };
    let cfg = SimConfig::new(1e-3, 300.0).unwrap();
    let traj = simulate(Model::Single, &x0, &Network::Switching(&sched), &sat, &cfg).unwrap();
    let xstar = mean(&x0);
    let mut prev = lyapunov_fixed(traj.positions(0), xstar, &sat).unwrap();
    for k in 1..traj.len() {
        let v = lyapunov_fixed(traj.positions(k), xstar, &sat).unwrap();
        assert!(v <= prev + 1e-9 + 1e-6 * prev);
        prev = v;
    }
    assert!(prev < 1e-6, "potential should shrink to zero, got {prev}");
}

/// Caratheodory sanity: simulating the schedule one period at a time in
/// separate calls matches a single long run at the switch-aligned steps.
#[test]
fn switching_simulation_is_consistent_across_periods() {
    let sched = three_phase_schedule();
    let sat = SaturationSpec::homogeneous(4, 1.0).unwrap();
    let x0 = [3.0, -5.0, 0.5, 0.5];
    let cfg = SimConfig::new(1e-3, 20.0)
        .unwrap()
        .with_stride(1000)
        .unwrap();
    let traj = simulate(Model::Single, &x0, &Network::Switching(&sched), &sat, &cfg).unwrap();
    // The same run with a coarser horizon split in two.
    let cfg_half = SimConfig::new(1e-3, 10.0)
        .unwrap()
        .with_stride(1000)
        .unwrap();
    let first = simulate(
        Model::Single,
        &x0,
        &Network::Switching(&sched),
        &sat,
        &cfg_half,
    )
    .unwrap();
    let mid: Vec<f64> = first.last_state().to_vec();
    let t10 = traj
        .times()
        .iter()
        .position(|&t| (t - 10.0).abs() < 1e-9)
        .expect("sample at the period boundary");
    for (a, b) in traj.state(t10).iter().zip(&mid) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn nonperiodic_schedule_rejects_integral_connectivity_but_simulates() {
    let seg = Segment::new(0.0, 5.0, vec![(0, 1, WeightFn::constant(1.0).unwrap())]);
    let sched = GraphSchedule::non_periodic(2, vec![seg], true).unwrap();
    assert!(sched.integral_graph(1e-9).is_err());
    let sat = SaturationSpec::homogeneous(2, 1.0).unwrap();
    let cfg = SimConfig::new(1e-2, 5.0).unwrap();
    let traj = simulate(
        Model::Single,
        &[0.5, -0.5],
        &Network::Switching(&sched),
        &sat,
        &cfg,
    )
    .unwrap();
    assert!(traj.position_disagreement(traj.len() - 1) < 1e-3);
}
