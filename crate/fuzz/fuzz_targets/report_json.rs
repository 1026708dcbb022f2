#![no_main]

use libfuzzer_sys::fuzz_target;
use relmod::{FitResult, GofReport, SimulationReport};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(fit) = FitResult::from_json(text) {
        let _ = FitResult::from_json(&fit.to_json()).expect("fit result re-parses");
    }
    if let Ok(report) = GofReport::from_json(text) {
        let _ = GofReport::from_json(&report.to_json()).expect("report re-parses");
    }
    if let Ok(report) = SimulationReport::from_json(text) {
        let _ = SimulationReport::from_json(&report.to_json()).expect("report re-parses");
    }
});
