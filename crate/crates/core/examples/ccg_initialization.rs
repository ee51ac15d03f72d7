//! Builds the contact-and-connection graph and draws seeded chromosomes.
//!
//! cargo run --example ccg_initialization > ccg.dot prints the graph in
//! Graphviz format on stdout and the draws on stderr.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robodsp::ccg::{build_ccg, ccgi_init, random_init};
use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use robodsp::objectives::evaluate;

fn main() {
    let ds = synthetic_dataset(&SyntheticSpec::tower(3, 2, 0), SimParams::default()).unwrap();
    let ccg = build_ccg(&ds).expect("tower is connected");
    print!("{}", ccg.to_dot());
    eprintln!("root {}", ccg.root_id());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let seq = ccgi_init(&ds, &ccg, &mut rng);
        let ids: Vec<String> = seq.removal_order().map(|p| p.to_string()).collect();
        eprintln!("ccgi   {} available={}", ids.join(" "), evaluate(&ds, &seq).unwrap().available);
    }
    for _ in 0..3 {
        let seq = random_init(&ds, &mut rng);
        let ids: Vec<String> = seq.removal_order().map(|p| p.to_string()).collect();
        eprintln!("random {} available={}", ids.join(" "), evaluate(&ds, &seq).unwrap().available);
    }
}
