mod common;

use robodsp::bench::{
    ablation_run, emit_report, history_csv, init_benchmark, single_objective_run, AblationReport, InitReport, Report,
    SingleObjectiveReport, ABLATION_HEADER, HISTORY_HEADER, INIT_HEADER, SINGLE_HEADER,
};
use robodsp::ccg::Initializer;
use robodsp::constraints::FeasibilityMode;
use robodsp::geomsim::SyntheticSpec;
use robodsp::model::{load_dataset, read_dataset, save_dataset, write_dataset};
use robodsp::nsga3::{run, GaConfig};

use common::*;

fn small_config() -> GaConfig {
    GaConfig {
        population: 24,
        generations: 8,
        iterations: 3,
        seed: 5,
        ..GaConfig::default()
    }
}

fn parse(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn init_report_round_trips() {
    let ds = ten_part(0);
    let report = init_benchmark(&ds, 300, &Initializer::ALL, 1, FeasibilityMode::AsWritten, 50).unwrap();
    let (header, rows) = parse(&report.to_csv());
    assert_eq!(header.join(","), INIT_HEADER);
    assert_eq!(rows.len(), 4);
    for (row, r) in rows.iter().zip(&report.rows) {
        assert_eq!(row[0], r.method.as_str());
        assert_eq!(row[1].parse::<usize>().unwrap(), 300);
        let rate: f64 = row[4].parse().unwrap();
        assert!((rate - r.available_rate).abs() < 1e-6);
        // rates are exact counts over the trials
        assert!((rate * 3.0 - (rate * 3.0).round()).abs() < 1e-6);
    }
    let json = serde_json::to_string(&report).unwrap();
    let back: InitReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn ablation_report_round_trips_and_emits_curves() {
    let ds = ten_part_labeled(2);
    let report = ablation_run(&ds, &small_config()).unwrap();
    let (header, rows) = parse(&report.to_csv());
    assert_eq!(header.join(","), ABLATION_HEADER);
    assert_eq!(rows.len(), 7);
    for (row, r) in rows.iter().zip(&report.rows) {
        assert_eq!(row[0], r.summary.label);
        let sum: f64 = row[12].parse().unwrap();
        assert!((sum - r.summary.mean.iter().sum::<f64>()).abs() < 1e-5);
    }
    let back: AblationReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back.rows.len(), report.rows.len());
    assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&report).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&report, dir.path()).unwrap();
    assert_eq!(written.len(), 2 + 7);
    let curve = std::fs::read_to_string(dir.path().join("ablation_history_proposed.csv")).unwrap();
    let (h, rows) = parse(&curve);
    assert_eq!(h.len(), 10);
    assert_eq!(h.join(","), HISTORY_HEADER);
    // one row per generation, gen 0 included, for every iteration
    assert_eq!(rows.len(), 3 * 9);
}

#[test]
fn single_objective_report_has_four_values_per_run() {
    let ds = ten_part_labeled(2);
    let report = single_objective_run(&ds, &small_config(), &[0, 1, 2, 3]).unwrap();
    let (header, rows) = parse(&report.to_csv());
    assert_eq!(header.join(","), SINGLE_HEADER);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.len() == 9));
    let back: SingleObjectiveReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&report).unwrap());
}

#[test]
fn history_csv_matches_the_run() {
    let result = run(&ten_part(1), &small_config()).unwrap();
    let (header, rows) = parse(&history_csv(&result.history));
    assert_eq!(header.len(), 10);
    assert_eq!(rows.len(), result.history.len());
    for (row, h) in rows.iter().zip(&result.history) {
        assert_eq!(row[0].parse::<usize>().unwrap(), h.iter);
        assert_eq!(row[1].parse::<usize>().unwrap(), h.gen);
        let rate: f64 = row[4].parse().unwrap();
        assert!((0.0..=100.0).contains(&rate));
    }
}

#[test]
fn unwritable_report_path_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let report = init_benchmark(&five_part(0), 10, &[Initializer::Random], 0, FeasibilityMode::AsWritten, 5).unwrap();
    assert!(emit_report(&report, &blocker.join("sub")).is_err());
}

#[test]
fn thirty_part_tower_round_trips_byte_identically() {
    let mut spec = SyntheticSpec::tower(7, 3, 30);
    spec.spacers = 1;
    spec.priority_count = 2;
    spec.manual_fraction = 0.3;
    let ds = tower(spec);
    assert_eq!(ds.catalog().len(), 30);
    assert_eq!(ds.active_len(), 29);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tower30.json");
    save_dataset(&ds, &path).unwrap();
    let first = std::fs::read_to_string(&path).unwrap();
    let loaded = load_dataset(&path).unwrap();
    assert_eq!(write_dataset(&loaded), first);
    assert_eq!(loaded.matrices(), ds.matrices());
    assert_eq!(loaded.catalog().parts(), ds.catalog().parts());
    assert_eq!(write_dataset(&read_dataset(&first).unwrap()), first);
}
