//! Runs the planner on a generated tower and prints the best plan.
//!
//! cargo run --release --example plan_tower -- [layers] [screws] [generations]

use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use robodsp::nsga3::{run, GaConfig};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let mut spec = SyntheticSpec::tower(*args.first().unwrap_or(&4), *args.get(1).unwrap_or(&3), 7);
    spec.priority_count = 2;
    spec.manual_fraction = 0.25;
    let ds = synthetic_dataset(&spec, SimParams::default()).unwrap();

    let config = GaConfig {
        generations: *args.get(2).unwrap_or(&100),
        iterations: 3,
        seed: 42,
        ..GaConfig::default()
    };
    let result = run(&ds, &config).expect("planner runs");
    for (step, id) in result.best.removal_order().enumerate() {
        let part = ds.catalog().get(id).unwrap();
        println!("{:>3}. {:<24} {}", step + 1, part.name, part.eef.as_deref().unwrap_or("-"));
    }
    let o = result.evaluation.objectives;
    println!(
        "available={} f_d={:.4} f_e={:.4} f_p={:.4} f_a={:.4}",
        result.evaluation.available, o.difficulty, o.efficiency, o.prioritization, o.allocability
    );
    let last = result.history.last().unwrap();
    println!("final population available rate {:.1}%", last.available_rate);
}
