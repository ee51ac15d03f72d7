//! Optimizes each objective alone and compares with the joint run.
//!
//! cargo run --release --example single_objective

use robodsp::bench::{single_objective_run, Report};
use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use robodsp::nsga3::GaConfig;

fn main() {
    let mut spec = SyntheticSpec::tower(3, 2, 5);
    spec.priority_count = 2;
    spec.manual_fraction = 0.3;
    let ds = synthetic_dataset(&spec, SimParams::default()).unwrap();
    let config = GaConfig {
        generations: 100,
        iterations: 5,
        seed: 2,
        ..GaConfig::default()
    };
    let report = single_objective_run(&ds, &config, &[0, 1, 2, 3]).unwrap();
    print!("{}", report.to_csv());
}
