//! Fuzz the trajectory CSV reader. Inputs that parse are re-exported and
//! re-imported; the round trip must reproduce the trajectory exactly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use satcon::harness::{import_csv, trajectory_to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(traj) = import_csv(text) else {
        return;
    };
    let csv = trajectory_to_csv(&traj);
    let back = import_csv(&csv).expect("round trip must parse");
    assert_eq!(back.times(), traj.times());
    for k in 0..traj.len() {
        assert_eq!(back.state(k), traj.state(k));
    }
});
