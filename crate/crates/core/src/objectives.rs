//! The four normalized objectives: difficulty, efficiency, prioritization
//! and allocability. All are minimized on `[0, 1]`; a sequence that is not
//! available scores `(1, 1, 1, 1)`.

use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintContext, ConstraintFlags, FeasibilityMode};
use crate::model::{Dataset, ModelError, Sequence, TaskLabel, CONSTRAINT_DIRECTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub difficulty: f64,
    pub efficiency: f64,
    pub prioritization: f64,
    pub allocability: f64,
}

impl ObjectiveVector {
    pub const PENALTY: ObjectiveVector = ObjectiveVector {
        difficulty: 1.0,
        efficiency: 1.0,
        prioritization: 1.0,
        allocability: 1.0,
    };

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.difficulty,
            self.efficiency,
            self.prioritization,
            self.allocability,
        ]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self {
            difficulty: v[0],
            efficiency: v[1],
            prioritization: v[2],
            allocability: v[3],
        }
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub feasible: bool,
    pub stable: bool,
    pub available: bool,
    /// Failing per-position constraint terms; 0 when available.
    pub violations: usize,
    pub objectives: ObjectiveVector,
}

impl Evaluation {
    fn from_flags(flags: &ConstraintFlags, objectives: ObjectiveVector) -> Self {
        Self {
            feasible: flags.feasible(),
            stable: flags.stable,
            available: flags.available,
            violations: flags.violations,
            objectives,
        }
    }
}

/// Dataset-derived tables needed to evaluate sequences quickly.
#[derive(Debug, Clone)]
pub struct Evaluator {
    constraints: ConstraintContext,
    mode: FeasibilityMode,
    n: usize,
    x_cs: Vec<u8>,
    task: Vec<TaskLabel>,
    com: Vec<[f64; 3]>,
    d_max: f64,
    priority: Vec<bool>,
    manual: Vec<bool>,
    priority_count: usize,
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl Evaluator {
    pub fn new(dataset: &Dataset, mode: FeasibilityMode) -> Self {
        let n = dataset.active_len();
        let parts: Vec<_> = (0..n).map(|i| dataset.part_at(i)).collect();
        let cs = &dataset.matrices().x_cs;
        let x_cs = (0..n * n).map(|e| cs.get(e / n, e % n)).collect();
        let com: Vec<[f64; 3]> = parts.iter().map(|p| p.com).collect();
        let d_max = (0..n)
            .flat_map(|i| (i + 1..n).map(move |k| (i, k)))
            .map(|(i, k)| distance(&com[i], &com[k]))
            .fold(0.0, f64::max);
        let priority: Vec<bool> = parts.iter().map(|p| p.priority).collect();
        Self {
            constraints: ConstraintContext::new(dataset),
            mode,
            n,
            x_cs,
            task: parts
                .iter()
                .map(|p| p.task.expect("active parts carry a task label"))
                .collect(),
            com,
            d_max,
            priority_count: priority.iter().filter(|&&p| p).count(),
            priority,
            manual: parts.iter().map(|p| p.is_manual()).collect(),
        }
    }

    pub fn constraints(&self) -> &ConstraintContext {
        &self.constraints
    }

    pub fn mode(&self) -> FeasibilityMode {
        self.mode
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Worst accumulated constraint degree over the removals, normalized.
    pub fn difficulty_idx(&self, idx: &[usize]) -> f64 {
        let np = idx.len();
        if np < 2 {
            return 0.0;
        }
        let h = (1..np)
            .map(|k| {
                idx[..k]
                    .iter()
                    .map(|&i| self.x_cs[i * self.n + idx[k]] as u32)
                    .sum::<u32>()
            })
            .max()
            .unwrap_or(0);
        h as f64 / (CONSTRAINT_DIRECTIONS as f64 * (np - 1) as f64)
    }

    /// Task-change ratio and travelled distance, averaged.
    pub fn efficiency_idx(&self, idx: &[usize]) -> f64 {
        let np = idx.len();
        if np < 2 {
            return 0.0;
        }
        let changes = idx
            .windows(2)
            .filter(|w| self.task[w[0]] != self.task[w[1]])
            .count();
        let travel: f64 = idx
            .windows(2)
            .map(|w| distance(&self.com[w[0]], &self.com[w[1]]))
            .sum();
        let distance_term = if self.d_max > 0.0 {
            travel / (np as f64 * self.d_max)
        } else {
            0.0
        };
        (changes as f64 / (np - 1) as f64 + distance_term) / 2.0
    }

    /// One minus the summed positions of priority parts over the largest
    /// attainable sum; 0 when every priority part is removed first.
    pub fn prioritization_idx(&self, idx: &[usize]) -> f64 {
        let np = idx.len();
        let npp = self.priority_count;
        if npp == 0 {
            return 0.0;
        }
        let r: usize = idx
            .iter()
            .enumerate()
            .filter(|(_, &i)| self.priority[i])
            .map(|(pos, _)| pos + 1)
            .sum();
        let r_max: usize = (np - npp + 1..=np).sum();
        1.0 - r as f64 / r_max as f64
    }

    /// Spread between the earliest and latest manual removal.
    pub fn allocability_idx(&self, idx: &[usize]) -> f64 {
        let np = idx.len();
        let mut positions = idx
            .iter()
            .enumerate()
            .filter(|(_, &i)| self.manual[i])
            .map(|(pos, _)| pos + 1);
        let Some(first) = positions.next() else {
            return 0.0;
        };
        let last = positions.next_back().unwrap_or(first);
        if np < 2 {
            return 0.0;
        }
        (last - first) as f64 / (np - 1) as f64
    }

    pub fn objectives_idx(&self, idx: &[usize]) -> ObjectiveVector {
        ObjectiveVector {
            difficulty: self.difficulty_idx(idx),
            efficiency: self.efficiency_idx(idx),
            prioritization: self.prioritization_idx(idx),
            allocability: self.allocability_idx(idx),
        }
    }

    pub fn evaluate_idx(&self, idx: &[usize]) -> Evaluation {
        let flags = self.constraints.check_idx(idx, self.mode);
        let objectives = if flags.available {
            self.objectives_idx(idx)
        } else {
            ObjectiveVector::PENALTY
        };
        Evaluation::from_flags(&flags, objectives)
    }

    pub fn evaluate(&self, dataset: &Dataset, seq: &Sequence) -> Result<Evaluation, ModelError> {
        Ok(self.evaluate_idx(&dataset.indices(seq)?))
    }

    pub fn difficulty(&self, dataset: &Dataset, seq: &Sequence, available: bool) -> Result<f64, ModelError> {
        gated(available, || Ok(self.difficulty_idx(&dataset.indices(seq)?)))
    }

    pub fn efficiency(&self, dataset: &Dataset, seq: &Sequence, available: bool) -> Result<f64, ModelError> {
        gated(available, || Ok(self.efficiency_idx(&dataset.indices(seq)?)))
    }

    pub fn prioritization(&self, dataset: &Dataset, seq: &Sequence, available: bool) -> Result<f64, ModelError> {
        gated(available, || Ok(self.prioritization_idx(&dataset.indices(seq)?)))
    }

    pub fn allocability(&self, dataset: &Dataset, seq: &Sequence, available: bool) -> Result<f64, ModelError> {
        gated(available, || Ok(self.allocability_idx(&dataset.indices(seq)?)))
    }
}

fn gated(available: bool, f: impl FnOnce() -> Result<f64, ModelError>) -> Result<f64, ModelError> {
    if available {
        f()
    } else {
        Ok(1.0)
    }
}

/// One-shot evaluation using the default feasibility mode.
pub fn evaluate(dataset: &Dataset, seq: &Sequence) -> Result<Evaluation, ModelError> {
    Evaluator::new(dataset, FeasibilityMode::default()).evaluate(dataset, seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Motion, MotionTable, Part, PartCatalog, PartId, RelationMatrices, SquareMatrix,
    };

    /// Fully free product (every pair touching, every direction free except
    /// one) with the given part names and centers of mass.
    fn product(names: &[&str], com: &[[f64; 3]], cs_free: usize) -> Dataset {
        let n = names.len();
        let parts = names
            .iter()
            .zip(com)
            .enumerate()
            .map(|(i, (name, c))| Part::from_name(i as u32 + 1, name, *c).unwrap())
            .collect();
        let mut ct = SquareMatrix::filled(n, 1u8);
        for i in 0..n {
            ct.set(i, i, 0);
        }
        let x_if = (0..6).map(|_| SquareMatrix::filled(n, 1)).collect();
        let x_cf = (0..12)
            .map(|j| SquareMatrix::filled(n, u8::from(j < cs_free)))
            .collect();
        let motions = MotionTable {
            motions: (1..=n as u32)
                .map(|id| {
                    (
                        PartId(id),
                        vec![Motion {
                            id: 0,
                            kind: "+z".into(),
                            row: vec![1; n],
                        }],
                    )
                })
                .collect(),
        };
        Dataset::new(
            PartCatalog::new(parts).unwrap(),
            (1..=n as u32).map(PartId).collect(),
            RelationMatrices::from_layers(x_if, x_cf, ct).unwrap(),
            motions,
        )
        .unwrap()
    }

    #[test]
    fn two_parts_with_degree_six_have_half_difficulty() {
        let ds = product(&["a_plate", "b_plate"], &[[0.0; 3]; 2], 6);
        let ev = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        assert_eq!(ev.difficulty_idx(&[0, 1]), 0.5);
    }

    #[test]
    fn coincident_same_label_parts_are_perfectly_efficient() {
        let ds = product(&["a_plate", "b_plate", "c_plate"], &[[1.0; 3]; 3], 11);
        let ev = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        assert_eq!(ev.d_max(), 0.0);
        assert_eq!(ev.efficiency_idx(&[2, 0, 1]), 0.0);
    }

    #[test]
    fn one_task_change_in_three_gives_half_task_term() {
        let ds = product(&["a_screw", "b_screw", "c_graspable"], &[[0.0; 3]; 3], 11);
        let ev = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        // distance term is zero, so f_e is the task term halved
        assert_eq!(ev.efficiency_idx(&[0, 1, 2]), 0.25);
    }

    #[test]
    fn priority_position_scores() {
        let names = ["a_plate", "b_plate", "c_plate", "d_plate", "motor_manual_value"];
        let ds = product(&names, &[[0.0; 3]; 5], 11);
        let ev = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        assert_eq!(ev.prioritization_idx(&[0, 1, 2, 3, 4]), 0.0);
        assert!((ev.prioritization_idx(&[4, 0, 1, 2, 3]) - 0.8).abs() < 1e-15);
        let plain = product(&names[..4], &[[0.0; 3]; 4], 11);
        let ev = Evaluator::new(&plain, FeasibilityMode::AsWritten);
        assert_eq!(ev.prioritization_idx(&[0, 1, 2, 3]), 0.0);
    }

    #[test]
    fn manual_spread() {
        let names = ["a_plate", "b_plate", "c_manual", "d_plate", "e_manual", "f_plate"];
        let ds = product(&names, &[[0.0; 3]; 6], 11);
        let ev = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        assert!((ev.allocability_idx(&[0, 1, 2, 3, 4, 5]) - 0.4).abs() < 1e-15);
        assert!((ev.allocability_idx(&[0, 1, 2, 4, 3, 5]) - 0.2).abs() < 1e-15);
        let single = product(&names[..4], &[[0.0; 3]; 4], 11);
        let ev = Evaluator::new(&single, FeasibilityMode::AsWritten);
        assert_eq!(ev.allocability_idx(&[0, 1, 2, 3]), 0.0);
    }

    #[test]
    fn unavailable_sequences_get_the_penalty() {
        let names = ["a_plate", "b_plate"];
        let mut ds = product(&names, &[[0.0; 3]; 2], 6);
        let mut m = ds.matrices().clone();
        m.x_if.iter_mut().for_each(|l| *l = SquareMatrix::new(2));
        ds = Dataset::new(ds.catalog().clone(), ds.part_order().to_vec(), m, ds.motions().clone())
            .unwrap();
        let seq = Sequence::new(vec![PartId(1), PartId(2)]);
        let e = evaluate(&ds, &seq).unwrap();
        assert!(!e.available && !e.feasible && e.stable);
        assert_eq!(e.objectives, ObjectiveVector::PENALTY);
        let ev = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        assert_eq!(ev.difficulty(&ds, &seq, false).unwrap(), 1.0);
        assert_eq!(ev.efficiency(&ds, &seq, false).unwrap(), 1.0);
        assert_eq!(ev.prioritization(&ds, &seq, false).unwrap(), 1.0);
        assert_eq!(ev.allocability(&ds, &seq, false).unwrap(), 1.0);
    }
}
