//! Runs the planner with each component switched off in turn.
//!
//! cargo run --release --example ablation_study -- [generations] [iterations]

use robodsp::bench::{ablation_run, Report};
use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use robodsp::nsga3::GaConfig;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let mut spec = SyntheticSpec::tower(3, 2, 3);
    spec.priority_count = 2;
    spec.manual_fraction = 0.3;
    let ds = synthetic_dataset(&spec, SimParams::default()).unwrap();
    let config = GaConfig {
        generations: *args.first().unwrap_or(&100),
        iterations: *args.get(1).unwrap_or(&5),
        seed: 1,
        ..GaConfig::default()
    };
    let report = ablation_run(&ds, &config).unwrap();
    print!("{}", report.to_csv());
}
