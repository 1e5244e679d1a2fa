//! Fuzz the scenario document parser: arbitrary text must yield either a
//! validated scenario or a structured error, never a panic or runaway
//! allocation.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = satcon::harness::parse_scenario(text);
    }
});
