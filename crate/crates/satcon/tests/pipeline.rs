//! End-to-end pipeline checks: every bundled scenario agrees with its
//! prediction, exports are deterministic and round-trip exactly, and a
//! corrupted prediction is flagged as disagreement.

use satcon::analysis::verify;
use satcon::dynamics::mean;
use satcon::harness::{
    self, builtin_scenario, builtin_scenarios, export_csv, export_summary, import_csv, read_csv,
    summary_to_json, trajectory_to_csv,
};

#[test]
fn every_builtin_agrees_with_its_prediction() {
    for scenario in builtin_scenarios() {
        let out = harness::run(&scenario).unwrap_or_else(|e| {
            panic!("builtin `{}` failed to run: {e}", scenario.name);
        });
        assert!(
            out.summary.diagnostics.agreement_with_prediction,
            "builtin `{}` disagrees: {:?}",
            scenario.name, out.summary.diagnostics
        );
        assert_eq!(out.summary.diagnostics.lyapunov_violations, 0);
        assert!(out.summary.diagnostics.average_drift <= 1e-6);
    }
}

#[test]
fn directed_builtin_reaches_the_weighted_average() {
    let out = harness::run(&builtin_scenario("fig11a").unwrap()).unwrap();
    let last = out.trajectory.last_state();
    for &x in last {
        assert!((x - 0.3455).abs() < 1e-3, "final state {x}");
    }
    let detected = out.summary.diagnostics.detected_value.unwrap();
    assert!((detected - 0.3455).abs() < 1e-3);
}

#[test]
fn heterogeneous_builtin_limit_structure() {
    // In the non-consensus heterogeneous run everyone except the unique
    // smallest-level agent ends on that level and the smallest-level agent
    // carries the surplus.
    let scenario = builtin_scenario("fig9b").unwrap();
    let out = harness::run(&scenario).unwrap();
    let last = out.trajectory.last_state();
    let expected_escape = 4.0 * 1.25 - 3.0;
    assert!((last[0] - expected_escape).abs() < 1e-2, "{last:?}");
    for &x in &last[1..] {
        assert!((x - 1.0).abs() < 1e-2, "{last:?}");
    }
    assert_eq!(out.summary.diagnostics.limit_match, Some(true));
}

#[test]
fn flipped_verdict_is_reported_as_disagreement_in_the_summary_file() {
    let scenario = builtin_scenario("fig8a").unwrap();
    let net = scenario.resolve_network().unwrap();
    let sat = scenario.resolve_saturation(net.node_count()).unwrap();
    let mut out = harness::run(&scenario).unwrap();
    out.summary.prediction.consensus_expected = false;
    out.summary.prediction.decision_value = None;
    let diag = verify(
        &out.trajectory,
        &out.summary.prediction,
        &net.as_network(),
        &sat,
        scenario.detection.tol,
    )
    .unwrap();
    assert!(!diag.agreement_with_prediction);
    out.summary.diagnostics = diag;
    let dir = std::env::temp_dir().join("satcon-pipeline-negative");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("flipped.summary.json");
    export_summary(&out.summary, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(
        text.contains("\"agreement_with_prediction\": false"),
        "{text}"
    );
}

#[test]
fn summaries_and_trajectories_are_byte_identical_across_runs() {
    let scenario = builtin_scenario("fig8a").unwrap();
    let a = harness::run(&scenario).unwrap();
    let b = harness::run(&scenario).unwrap();
    assert_eq!(summary_to_json(&a.summary), summary_to_json(&b.summary));
    assert_eq!(
        trajectory_to_csv(&a.trajectory),
        trajectory_to_csv(&b.trajectory)
    );
}

#[test]
fn csv_file_round_trip_reproduces_the_trajectory() {
    let scenario = builtin_scenario("fig11a").unwrap();
    let out = harness::run(&scenario).unwrap();
    let dir = std::env::temp_dir().join("satcon-pipeline-roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("traj.csv");
    export_csv(&out.trajectory, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.times(), out.trajectory.times());
    for k in 0..out.trajectory.len() {
        assert_eq!(back.state(k), out.trajectory.state(k));
    }
}

#[test]
fn summary_contains_every_report_field() {
    let out = harness::run(&builtin_scenario("fig8a").unwrap()).unwrap();
    let json = summary_to_json(&out.summary);
    for key in [
        "scenario",
        "prediction",
        "theorem",
        "consensus_expected",
        "condition_value",
        "threshold",
        "decision_value",
        "predicted_limit",
        "diagnostics",
        "consensus_observed",
        "final_disagreement",
        "detected_value",
        "average_drift",
        "lyapunov_violations",
        "worst_lyapunov_violation",
        "box_invariance_violations",
        "limit_match",
        "agreement_with_prediction",
        "steps",
        "dt",
    ] {
        assert!(
            json.contains(&format!("\"{key}\"")),
            "missing {key} in {json}"
        );
    }
    // Wall time is nondeterministic and must stay out of the file.
    assert!(!json.contains("wall_time"));
}

#[test]
fn csv_import_rejects_malformed_documents() {
    assert!(import_csv("t,x_1\nnot,numbers\n").is_err());
    assert!(import_csv("t,x_1\n0.0\n").is_err());
    assert!(import_csv("t,x_1\n0.0,1.0,2.0\n").is_err());
    assert!(import_csv("t,x_1\n0.0,inf\n").is_err());
}

#[test]
fn double_integrator_positions_track_the_moving_average() {
    // Positions of agreeing double integrators drift at the conserved mean
    // velocity: disagreement shrinks even though the states keep moving.
    let out = harness::run(&builtin_scenario("fig5").unwrap()).unwrap();
    let traj = &out.trajectory;
    let last = traj.len() - 1;
    assert!(traj.position_disagreement(last) < 1e-2);
    assert!(traj.velocity_disagreement(last) < 1e-2);
    let v_mean = mean(traj.velocities(last));
    assert!((v_mean + 0.85).abs() < 1e-6);
    let x_final = mean(traj.positions(last));
    let x_start = mean(traj.positions(0));
    let drift = x_final - x_start;
    assert!((drift - (-0.85) * 300.0).abs() < 1.0, "drift {drift}");
}
