//! Builds a screw tower in the voxel simulator and saves it as a dataset.
//!
//! cargo run --example generate_tower -- [layers] [screws] [seed] [out.json]

use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use robodsp::model::{dataset_digest, save_dataset};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, d: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let mut spec = SyntheticSpec::tower(num(0, 3) as usize, num(1, 2) as usize, num(2, 0));
    spec.priority_count = 1;
    spec.manual_fraction = 0.2;
    let out = args.get(3).cloned().unwrap_or_else(|| "tower.json".into());

    let ds = synthetic_dataset(&spec, SimParams::default()).expect("tower builds");
    for part in ds.catalog().parts() {
        let task = part.task.map_or("-", |t| t.as_str());
        println!("{:>4} {:<24} {task:<9} priority={}", part.id, part.name, part.priority);
    }
    save_dataset(&ds, &out).expect("dataset written");
    println!("{} parts -> {out} (sha256 {})", ds.catalog().len(), dataset_digest(&ds));
}
