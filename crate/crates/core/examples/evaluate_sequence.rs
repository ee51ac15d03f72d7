//! Scores hand-written sequences against the constraints and objectives.
//!
//! cargo run --example evaluate_sequence

use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use robodsp::model::{PartId, Sequence};
use robodsp::objectives::evaluate;

fn main() {
    let ds = synthetic_dataset(&SyntheticSpec::tower(2, 1, 0), SimParams::default()).unwrap();
    for p in ds.catalog().parts() {
        println!("{} {}", p.id, p.name);
    }
    // removal order: top screw, top block, lower screw, lower block, base
    let top_down: Vec<PartId> = [5, 4, 3, 2, 1].map(PartId).to_vec();
    let candidates = [
        ("top down", Sequence::from_removal_order(top_down.clone())),
        ("block before its screw", {
            let mut s = top_down.clone();
            s.swap(0, 1);
            Sequence::from_removal_order(s)
        }),
        ("base first", {
            let mut s = top_down;
            s.rotate_right(1);
            Sequence::from_removal_order(s)
        }),
    ];
    for (label, seq) in candidates {
        let e = evaluate(&ds, &seq).unwrap();
        let o = e.objectives;
        println!(
            "{label:<24} available={} feasible={} stable={} violations={} f=({:.4}, {:.4}, {:.4}, {:.4})",
            e.available, e.feasible, e.stable, e.violations, o.difficulty, o.efficiency, o.prioritization, o.allocability
        );
    }
}
