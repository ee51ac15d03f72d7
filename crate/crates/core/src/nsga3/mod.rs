//! Many-objective genetic search over removal sequences.
//!
//! Each iteration seeds a population, then alternates offspring
//! generation with environmental selection over the merged parent and
//! offspring pool. Unavailable sequences carry the all-ones penalty and
//! are never repaired.

mod niching;
mod operators;
mod reference;
mod sorting;

pub use niching::{associate, crowding_select, niche_select, normalize, Selection};
pub use operators::{
    break_and_join, crossover, cut_and_paste, move_window, mutate, ox1_with_window, rotate_at,
    swap_positions,
};
pub use reference::{binomial, das_dennis_points, ReferencePointSet};
pub use sorting::{crowding_distance, dominates, non_dominated_sort, ranks};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccg::{CcgError, Initializer, Seeder, DEFAULT_MAX_PASSES};
use crate::constraints::FeasibilityMode;
use crate::model::{Dataset, ModelError, Sequence, TaskLabel};
use crate::objectives::{Evaluation, Evaluator};

pub const OBJECTIVE_NAMES: [&str; 4] = ["d", "e", "p", "a"];

/// Which objectives take part in sorting and best extraction. Disabled
/// objectives are held at 0 for selection but still reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ObjectiveMask(pub [bool; 4]);

impl ObjectiveMask {
    pub const ALL: ObjectiveMask = ObjectiveMask([true; 4]);

    pub fn only(objective: usize) -> Self {
        let mut m = [false; 4];
        m[objective] = true;
        Self(m)
    }

    pub fn without(objective: usize) -> Self {
        let mut m = [true; 4];
        m[objective] = false;
        Self(m)
    }

    pub fn apply(&self, v: [f64; 4]) -> [f64; 4] {
        std::array::from_fn(|d| if self.0[d] { v[d] } else { 0.0 })
    }

    pub fn sum(&self, v: [f64; 4]) -> f64 {
        self.apply(v).iter().sum()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl Default for ObjectiveMask {
    fn default() -> Self {
        Self::ALL
    }
}

impl fmt::Display for ObjectiveMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = (0..4).filter(|&d| self.0[d]).map(|d| OBJECTIVE_NAMES[d]).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for ObjectiveMask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut m = [false; 4];
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let d = OBJECTIVE_NAMES
                .iter()
                .position(|n| n.eq_ignore_ascii_case(token))
                .ok_or_else(|| format!("unknown objective `{token}` (expected d, e, p or a)"))?;
            m[d] = true;
        }
        if !m.iter().any(|&b| b) {
            return Err("at least one objective must be enabled".into());
        }
        Ok(Self(m))
    }
}

impl From<ObjectiveMask> for String {
    fn from(m: ObjectiveMask) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for ObjectiveMask {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $name {
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.to_ascii_lowercase().as_str() {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(concat!("unknown ", stringify!($name), " `{}`"), s)),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mating {
    Random,
    #[default]
    Tournament,
}

keyword_enum!(Mating { Random => "random", Tournament => "tournament" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Survival {
    /// Reference-line niching.
    #[default]
    Niching,
    /// NSGA-II crowding distance.
    Crowding,
}

keyword_enum!(Survival { Niching => "niching", Crowding => "crowding" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub iterations: usize,
    pub divisions: usize,
    pub seed: u64,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub cut_paste_rate: f64,
    pub break_join_rate: f64,
    pub mode: FeasibilityMode,
    pub objectives: ObjectiveMask,
    pub mating: Mating,
    pub survival: Survival,
    pub initializer: Initializer,
    pub normalize: bool,
    pub parallel: bool,
    pub fr_max_passes: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 500,
            iterations: 10,
            divisions: 6,
            seed: 0,
            crossover_rate: 0.9,
            mutation_rate: 0.3,
            cut_paste_rate: 0.2,
            break_join_rate: 0.1,
            mode: FeasibilityMode::AsWritten,
            objectives: ObjectiveMask::ALL,
            mating: Mating::Tournament,
            survival: Survival::Niching,
            initializer: Initializer::Ccg,
            normalize: false,
            parallel: false,
            fr_max_passes: DEFAULT_MAX_PASSES,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{name} must lie in [0, 1], got {value}")]
    Rate { name: &'static str, value: f64 },
    #[error("population must be at least 4, got {0}")]
    Population(usize),
    #[error("reference-point divisions must be at least 1")]
    Divisions,
}

impl GaConfig {
    pub fn rates(&self) -> [f64; 4] {
        [
            self.crossover_rate,
            self.mutation_rate,
            self.cut_paste_rate,
            self.break_join_rate,
        ]
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let names = ["crossover rate", "mutation rate", "cut-and-paste rate", "break-and-join rate"];
        for (name, value) in names.into_iter().zip(self.rates()) {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Rate { name, value });
            }
        }
        if self.population < 4 {
            return Err(ConfigError::Population(self.population));
        }
        if self.divisions < 1 {
            return Err(ConfigError::Divisions);
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Graph(#[from] CcgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Population statistics after one generation's survival.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iter: usize,
    pub gen: usize,
    pub feasible_rate: f64,
    pub stable_rate: f64,
    pub available_rate: f64,
    pub mean: [f64; 4],
    pub std: [f64; 4],
    /// Masked objective sum of the iteration's best-so-far.
    pub best_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationBest {
    pub iteration: usize,
    pub sequence: Sequence,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    /// Storage order: the first entry is removed last.
    pub best: Sequence,
    pub evaluation: Evaluation,
    /// Task label of each part of `best`, in storage order.
    pub task_labels: Vec<TaskLabel>,
    pub history: Vec<HistoryRow>,
    pub iteration_bests: Vec<IterationBest>,
}

/// Orders evaluations for best extraction; `Less` means `a` is better.
pub fn compare_evaluations(a: &Evaluation, b: &Evaluation, mask: ObjectiveMask) -> Ordering {
    match (a.available, b.available) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a.violations.cmp(&b.violations),
        (true, true) => {
            let (va, vb) = (mask.apply(a.objectives.as_array()), mask.apply(b.objectives.as_array()));
            let (sa, sb): (f64, f64) = (va.iter().sum(), vb.iter().sum());
            sa.total_cmp(&sb).then_with(|| {
                va.iter()
                    .zip(&vb)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
        }
    }
}

/// Index of the best member; ties keep the lowest index.
pub fn best_solution_extraction(evaluations: &[Evaluation], mask: ObjectiveMask) -> Option<usize> {
    (0..evaluations.len()).reduce(|best, i| {
        if compare_evaluations(&evaluations[i], &evaluations[best], mask).is_lt() {
            i
        } else {
            best
        }
    })
}

/// Masked score used for best-so-far tracking.
pub fn masked_sum(e: &Evaluation, mask: ObjectiveMask) -> f64 {
    mask.sum(e.objectives.as_array())
}

struct Tracker {
    best: Option<(Vec<usize>, Evaluation)>,
    mask: ObjectiveMask,
}

impl Tracker {
    fn new(mask: ObjectiveMask) -> Self {
        Self { best: None, mask }
    }

    fn offer(&mut self, members: &[Vec<usize>], evals: &[Evaluation]) {
        if let Some(i) = best_solution_extraction(evals, self.mask) {
            let better = match &self.best {
                None => true,
                Some((_, e)) => compare_evaluations(&evals[i], e, self.mask).is_lt(),
            };
            if better {
                self.best = Some((members[i].clone(), evals[i]));
            }
        }
    }

    fn score(&self) -> f64 {
        self.best.as_ref().map_or(self.mask.count() as f64, |(_, e)| masked_sum(e, self.mask))
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    if n == 0.0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn history_row(iter: usize, gen: usize, evals: &[Evaluation], best_sum: f64) -> HistoryRow {
    let pct = |f: fn(&Evaluation) -> bool| 100.0 * evals.iter().filter(|e| f(e)).count() as f64 / evals.len() as f64;
    let mut mean = [0.0; 4];
    let mut std = [0.0; 4];
    for d in 0..4 {
        (mean[d], std[d]) = mean_std(evals.iter().map(move |e| e.objectives.as_array()[d]));
    }
    HistoryRow {
        iter,
        gen,
        feasible_rate: pct(|e| e.feasible),
        stable_rate: pct(|e| e.stable),
        available_rate: pct(|e| e.available),
        mean,
        std,
        best_sum,
    }
}

struct Engine<'a> {
    config: &'a GaConfig,
    evaluator: Evaluator,
    refs: ReferencePointSet,
}

impl Engine<'_> {
    fn evaluate(&self, members: &[Vec<usize>]) -> Vec<Evaluation> {
        if self.config.parallel {
            members.par_iter().map(|m| self.evaluator.evaluate_idx(m)).collect()
        } else {
            members.iter().map(|m| self.evaluator.evaluate_idx(m)).collect()
        }
    }

    fn select(&self, evals: &[Evaluation], n: usize, rng: &mut ChaCha8Rng) -> Selection {
        let points: Vec<[f64; 4]> = evals
            .iter()
            .map(|e| self.config.objectives.apply(e.objectives.as_array()))
            .collect();
        match self.config.survival {
            Survival::Niching => niche_select(&points, &self.refs, n, self.config.normalize, rng),
            Survival::Crowding => crowding_select(&points, n),
        }
    }

    fn pick_parent(&self, rank: &[usize], key: &[f64], rng: &mut ChaCha8Rng) -> usize {
        let n = rank.len();
        let a = rng.gen_range(0..n);
        if self.config.mating == Mating::Random {
            return a;
        }
        let b = rng.gen_range(0..n);
        let a_wins = (rank[a], key[a]) <= (rank[b], key[b]) || key[b].is_nan();
        if a_wins {
            a
        } else {
            b
        }
    }

    fn offspring(&self, pop: &[Vec<usize>], rank: &[usize], key: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
        let c = self.config;
        let mut out = Vec::with_capacity(pop.len());
        while out.len() < pop.len() {
            let p1 = &pop[self.pick_parent(rank, key, rng)];
            let p2 = &pop[self.pick_parent(rank, key, rng)];
            let (c1, c2) = if rng.gen_bool(c.crossover_rate) {
                crossover(p1, p2, rng)
            } else {
                (p1.clone(), p2.clone())
            };
            for mut child in [c1, c2] {
                if out.len() == pop.len() {
                    break;
                }
                if rng.gen_bool(c.mutation_rate) {
                    mutate(&mut child, rng);
                }
                if rng.gen_bool(c.cut_paste_rate) {
                    cut_and_paste(&mut child, rng);
                }
                if rng.gen_bool(c.break_join_rate) {
                    break_and_join(&mut child, rng);
                }
                out.push(child);
            }
        }
        out
    }
}

/// Runs the planner. Bitwise deterministic for a given seed, with or
/// without parallel evaluation.
pub fn run(dataset: &Dataset, config: &GaConfig) -> Result<PlanResult, PlanError> {
    config.validate()?;
    let seeder = Seeder::new(dataset, config.initializer, config.mode, config.fr_max_passes)?;
    let engine = Engine {
        config,
        evaluator: Evaluator::new(dataset, config.mode),
        refs: das_dennis_points(4, config.divisions),
    };
    let n = config.population;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut global = Tracker::new(config.objectives);
    let mut history = Vec::new();
    let mut iteration_bests = Vec::new();
    let to_sequence = |idx: &[usize]| Sequence::new(idx.iter().map(|&i| dataset.part_order()[i]).collect());

    for iter in 1..=config.iterations {
        let mut pop: Vec<Vec<usize>> = (0..n).map(|_| seeder.draw(&mut rng)).collect();
        let mut evals = engine.evaluate(&pop);
        let mut tracker = Tracker::new(config.objectives);
        tracker.offer(&pop, &evals);
        let sel = engine.select(&evals, n, &mut rng);
        pop = sel.survivors.iter().map(|&i| pop[i].clone()).collect();
        evals = sel.survivors.iter().map(|&i| evals[i]).collect();
        let (mut rank, mut key) = (sel.rank, sel.key);
        history.push(history_row(iter, 0, &evals, tracker.score()));

        for gen in 1..=config.generations {
            let children = engine.offspring(&pop, &rank, &key, &mut rng);
            let child_evals = engine.evaluate(&children);
            tracker.offer(&children, &child_evals);
            pop.extend(children);
            evals.extend(child_evals);
            let sel = engine.select(&evals, n, &mut rng);
            pop = sel.survivors.iter().map(|&i| pop[i].clone()).collect();
            evals = sel.survivors.iter().map(|&i| evals[i]).collect();
            (rank, key) = (sel.rank, sel.key);
            history.push(history_row(iter, gen, &evals, tracker.score()));
        }

        let (idx, evaluation) = tracker.best.clone().expect("population is non-empty");
        log::info!(
            "iteration {iter}: best available={} sum={:.6}",
            evaluation.available,
            masked_sum(&evaluation, config.objectives)
        );
        global.offer(std::slice::from_ref(&idx), std::slice::from_ref(&evaluation));
        iteration_bests.push(IterationBest {
            iteration: iter,
            sequence: to_sequence(&idx),
            evaluation,
        });
    }

    let (idx, evaluation) = match global.best {
        Some(best) => best,
        None => {
            // no iterations: score one seeded member
            let idx = seeder.draw(&mut rng);
            let e = engine.evaluator.evaluate_idx(&idx);
            (idx, e)
        }
    };
    let best = to_sequence(&idx);
    let task_labels = idx
        .iter()
        .map(|&i| dataset.part_at(i).task.expect("active parts carry a task label"))
        .collect();
    Ok(PlanResult {
        best,
        evaluation,
        task_labels,
        history,
        iteration_bests,
    })
}
