//! Loads a dataset file and prints its relation matrices.
//!
//! cargo run --example load_dataset -- tower.json

use robodsp::model::load_dataset;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "tower.json".into());
    let ds = match load_dataset(&path) {
        Ok(ds) => ds,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    };
    let m = ds.matrices();
    let names: Vec<&str> = ds.part_order().iter().map(|&id| ds.catalog().get(id).unwrap().name.as_str()).collect();
    println!("{} active parts", names.len());
    println!("constraint degree (row blocks column):");
    for (i, name) in names.iter().enumerate() {
        let row: Vec<String> = (0..names.len()).map(|k| m.x_cs.get(i, k).to_string()).collect();
        println!("  {name:<24} {}", row.join(" "));
    }
    println!("contacts:");
    for i in 0..names.len() {
        for k in i + 1..names.len() {
            if m.x_ct.get(i, k) != 0 {
                println!("  {} -- {}", names[i], names[k]);
            }
        }
    }
    for &id in ds.part_order() {
        println!("{id}: {} motions", ds.motions().motions_of(id).len());
    }
}
