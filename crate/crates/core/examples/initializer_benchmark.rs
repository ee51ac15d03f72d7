//! Compares the four chromosome initializers on a tower.
//!
//! cargo run --release --example initializer_benchmark -- [trials] [out_dir]

use robodsp::bench::{emit_report, init_benchmark, Report};
use robodsp::ccg::{Initializer, DEFAULT_MAX_PASSES};
use robodsp::constraints::FeasibilityMode;
use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};

fn main() {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let ds = synthetic_dataset(&SyntheticSpec::tower(3, 2, 0), SimParams::default()).unwrap();
    for mode in [FeasibilityMode::AsWritten, FeasibilityMode::Strict] {
        let report = init_benchmark(&ds, trials, &Initializer::ALL, 0, mode, DEFAULT_MAX_PASSES).unwrap();
        println!("mode {mode}");
        print!("{}", report.to_csv());
        if let Some(dir) = std::env::args().nth(2) {
            emit_report(&report, &std::path::Path::new(&dir).join(mode.to_string())).unwrap();
        }
    }
}
