//! Experiment harness: initializer benchmarks, ablations and
//! single-objective comparisons, with CSV and JSON reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccg::{CcgError, Initializer, Seeder};
use crate::constraints::{ConstraintContext, FeasibilityMode};
use crate::model::Dataset;
use crate::nsga3::{run, GaConfig, HistoryRow, ObjectiveMask, PlanError, PlanResult, Survival, OBJECTIVE_NAMES};

pub const HISTORY_HEADER: &str =
    "iter,gen,feasible_rate,stable_rate,available_rate,mean_fd,mean_fe,mean_fp,mean_fa,best_sum";
pub const INIT_HEADER: &str = "method,trials,feasible_rate,stable_rate,available_rate";
pub const ABLATION_HEADER: &str = "variant,feasible_rate,stable_rate,available_rate,mean_fd,mean_fe,mean_fp,mean_fa,std_fd,std_fe,std_fp,std_fa,objective_sum,normalized_sigma";
pub const SINGLE_HEADER: &str = "run,mean_fd,mean_fe,mean_fp,mean_fa,std_fd,std_fe,std_fp,std_fa";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Graph(#[from] CcgError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn percent(count: usize, total: usize) -> f64 {
    100.0 * count as f64 / total as f64
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Random stream for one trial. Every method sees the same stream for
/// the same trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A report that can be written as CSV plus JSON.
pub trait Report: Serialize {
    /// File stem of the report files.
    fn name(&self) -> &str;
    fn to_csv(&self) -> String;
    /// Per-generation curves, keyed by a file-name-safe label.
    fn curves(&self) -> Vec<(String, &[HistoryRow])> {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitRow {
    pub method: Initializer,
    pub trials: usize,
    pub feasible_rate: f64,
    pub stable_rate: f64,
    pub available_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitReport {
    pub seed: u64,
    pub mode: FeasibilityMode,
    pub rows: Vec<InitRow>,
}

impl Report for InitReport {
    fn name(&self) -> &str {
        "init_bench"
    }

    fn to_csv(&self) -> String {
        let mut s = format!("{INIT_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.method,
                r.trials,
                fixed(r.feasible_rate),
                fixed(r.stable_rate),
                fixed(r.available_rate)
            );
        }
        s
    }
}

/// Draws `trials` sequences per method and scores them.
pub fn init_benchmark(
    dataset: &Dataset,
    trials: usize,
    methods: &[Initializer],
    seed: u64,
    mode: FeasibilityMode,
    max_passes: usize,
) -> Result<InitReport, BenchError> {
    if trials == 0 {
        return Err(BenchError::NoTrials);
    }
    let ctx = ConstraintContext::new(dataset);
    let mut rows = Vec::new();
    for &method in methods {
        let seeder = Seeder::new(dataset, method, mode, max_passes)?;
        let counts = (0..trials)
            .into_par_iter()
            .map(|t| {
                let idx = seeder.draw(&mut trial_rng(seed, t as u64));
                let f = ctx.check_idx(&idx, mode);
                [f.feasible() as usize, f.stable as usize, f.available as usize]
            })
            .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
        rows.push(InitRow {
            method,
            trials,
            feasible_rate: percent(counts[0], trials),
            stable_rate: percent(counts[1], trials),
            available_rate: percent(counts[2], trials),
        });
    }
    Ok(InitReport { seed, mode, rows })
}

/// Summary of one planner configuration over its iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    /// Mean over iterations of the final population's rates.
    pub feasible_rate: f64,
    pub stable_rate: f64,
    pub available_rate: f64,
    /// Mean and population standard deviation over the iteration bests.
    pub mean: [f64; 4],
    pub std: [f64; 4],
    pub history: Vec<HistoryRow>,
}

impl RunSummary {
    pub fn from_result(label: impl Into<String>, result: &PlanResult) -> Self {
        let finals: Vec<&HistoryRow> = result
            .history
            .iter()
            .enumerate()
            .filter(|(i, row)| result.history.get(i + 1).is_none_or(|next| next.iter != row.iter))
            .map(|(_, row)| row)
            .collect();
        let rate = |f: fn(&HistoryRow) -> f64| mean_std(&finals.iter().map(|r| f(r)).collect::<Vec<_>>()).0;
        let mut mean = [0.0; 4];
        let mut std = [0.0; 4];
        for d in 0..4 {
            let values: Vec<f64> = result
                .iteration_bests
                .iter()
                .map(|b| b.evaluation.objectives.as_array()[d])
                .collect();
            (mean[d], std[d]) = mean_std(&values);
        }
        Self {
            label: label.into(),
            feasible_rate: rate(|r| r.feasible_rate),
            stable_rate: rate(|r| r.stable_rate),
            available_rate: rate(|r| r.available_rate),
            mean,
            std,
            history: result.history.clone(),
        }
    }

    pub fn objective_sum(&self) -> f64 {
        self.mean.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    #[serde(flatten)]
    pub summary: RunSummary,
    pub objective_sum: f64,
    /// Spread of the min-max normalized objective means.
    pub normalized_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub config: GaConfig,
    pub rows: Vec<AblationRow>,
}

impl AblationReport {
    pub fn row(&self, label: &str) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.summary.label == label)
    }
}

fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect::<String>()
        .split('_')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

impl Report for AblationReport {
    fn name(&self) -> &str {
        "ablation"
    }

    fn to_csv(&self) -> String {
        let mut s = format!("{ABLATION_HEADER}\n");
        for r in &self.rows {
            let m = &r.summary;
            let cols: Vec<String> = [m.feasible_rate, m.stable_rate, m.available_rate]
                .into_iter()
                .chain(m.mean)
                .chain(m.std)
                .chain([r.objective_sum, r.normalized_sigma])
                .map(fixed)
                .collect();
            let _ = writeln!(s, "{},{}", m.label, cols.join(","));
        }
        s
    }

    fn curves(&self) -> Vec<(String, &[HistoryRow])> {
        self.rows
            .iter()
            .map(|r| (slug(&r.summary.label), r.summary.history.as_slice()))
            .collect()
    }
}

pub const PROPOSED: &str = "proposed";
pub const WITHOUT_CCGI: &str = "w/o CCGI";
pub const WITHOUT_NSGA3: &str = "w/o NSGA-III";

pub fn without_objective_label(objective: usize) -> String {
    format!("w/o f_{}", OBJECTIVE_NAMES[objective])
}

/// The ablation variants derived from a base configuration.
pub fn ablation_variants(base: &GaConfig) -> Vec<(String, GaConfig)> {
    let mut out = vec![
        (PROPOSED.to_string(), base.clone()),
        (
            WITHOUT_CCGI.to_string(),
            GaConfig {
                initializer: Initializer::Feasibility,
                ..base.clone()
            },
        ),
        (
            WITHOUT_NSGA3.to_string(),
            GaConfig {
                survival: Survival::Crowding,
                ..base.clone()
            },
        ),
    ];
    for d in 0..4 {
        out.push((
            without_objective_label(d),
            GaConfig {
                objectives: ObjectiveMask::without(d),
                ..base.clone()
            },
        ));
    }
    out
}

/// Min-max normalizes each objective mean over the reference rows, then
/// takes the population standard deviation of each row's four values.
pub fn normalized_sigmas(means: &[[f64; 4]], reference: &[usize]) -> Vec<f64> {
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for &r in reference {
        for d in 0..4 {
            lo[d] = lo[d].min(means[r][d]);
            hi[d] = hi[d].max(means[r][d]);
        }
    }
    means
        .iter()
        .map(|m| {
            let scaled: Vec<f64> = (0..4)
                .map(|d| if hi[d] > lo[d] { (m[d] - lo[d]) / (hi[d] - lo[d]) } else { 0.0 })
                .collect();
            mean_std(&scaled).1
        })
        .collect()
}

/// Runs every ablation variant with the base seed. Normalization spans
/// all variants except w/o CCGI.
pub fn ablation_run(dataset: &Dataset, base: &GaConfig) -> Result<AblationReport, BenchError> {
    let variants = ablation_variants(base);
    let results: Vec<RunSummary> = variants
        .par_iter()
        .map(|(label, cfg)| run(dataset, cfg).map(|r| RunSummary::from_result(label.clone(), &r)))
        .collect::<Result<_, _>>()?;
    let means: Vec<[f64; 4]> = results.iter().map(|r| r.mean).collect();
    let reference: Vec<usize> = (0..results.len()).filter(|&i| results[i].label != WITHOUT_CCGI).collect();
    let sigmas = normalized_sigmas(&means, &reference);
    let rows = results
        .into_iter()
        .zip(sigmas)
        .map(|(summary, normalized_sigma)| AblationRow {
            objective_sum: summary.objective_sum(),
            normalized_sigma,
            summary,
        })
        .collect();
    Ok(AblationReport {
        config: base.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleObjectiveReport {
    pub config: GaConfig,
    /// One row per requested objective (`w/ f_x`), then the
    /// all-objective run.
    pub rows: Vec<RunSummary>,
}

impl SingleObjectiveReport {
    pub fn row(&self, label: &str) -> Option<&RunSummary> {
        self.rows.iter().find(|r| r.label == label)
    }
}

impl Report for SingleObjectiveReport {
    fn name(&self) -> &str {
        "single_objective"
    }

    fn to_csv(&self) -> String {
        let mut s = format!("{SINGLE_HEADER}\n");
        for r in &self.rows {
            let cols: Vec<String> = r.mean.into_iter().chain(r.std).map(fixed).collect();
            let _ = writeln!(s, "{},{}", r.label, cols.join(","));
        }
        s
    }

    fn curves(&self) -> Vec<(String, &[HistoryRow])> {
        self.rows.iter().map(|r| (slug(&r.label), r.history.as_slice())).collect()
    }
}

pub fn with_objective_label(objective: usize) -> String {
    format!("w/ f_{}", OBJECTIVE_NAMES[objective])
}

pub const MULTI_OBJECTIVE: &str = "all objectives";

/// Optimizes each listed objective alone under the constraints, plus one
/// run with all four, all on the same seed.
pub fn single_objective_run(
    dataset: &Dataset,
    config: &GaConfig,
    objectives: &[usize],
) -> Result<SingleObjectiveReport, BenchError> {
    let mut runs: Vec<(String, GaConfig)> = objectives
        .iter()
        .map(|&d| {
            (
                with_objective_label(d),
                GaConfig {
                    objectives: ObjectiveMask::only(d),
                    ..config.clone()
                },
            )
        })
        .collect();
    runs.push((
        MULTI_OBJECTIVE.to_string(),
        GaConfig {
            objectives: ObjectiveMask::ALL,
            ..config.clone()
        },
    ));
    let rows = runs
        .par_iter()
        .map(|(label, cfg)| run(dataset, cfg).map(|r| RunSummary::from_result(label.clone(), &r)))
        .collect::<Result<_, _>>()?;
    Ok(SingleObjectiveReport {
        config: config.clone(),
        rows,
    })
}

pub fn history_csv(history: &[HistoryRow]) -> String {
    let mut s = format!("{HISTORY_HEADER}\n");
    for h in history {
        let cols: Vec<String> = [h.feasible_rate, h.stable_rate, h.available_rate]
            .into_iter()
            .chain(h.mean)
            .chain([h.best_sum])
            .map(fixed)
            .collect();
        let _ = writeln!(s, "{},{},{}", h.iter, h.gen, cols.join(","));
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), BenchError> {
    std::fs::write(path, text).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `<name>.csv`, `<name>.json` and one `<name>_history_<curve>.csv`
/// per curve into `dir`, creating it if needed.
pub fn emit_report<R: Report>(report: &R, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let csv = dir.join(format!("{}.csv", report.name()));
    write_file(&csv, &report.to_csv())?;
    written.push(csv);
    let json = dir.join(format!("{}.json", report.name()));
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    write_file(&json, &text)?;
    written.push(json);
    for (label, history) in report.curves() {
        let path = dir.join(format!("{}_history_{label}.csv", report.name()));
        write_file(&path, &history_csv(history))?;
        written.push(path);
    }
    Ok(written)
}
