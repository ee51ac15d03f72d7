//! Order feasibility, motion feasibility and stability of a sequence.
//!
//! Every criterion is a conjunction of per-position terms: the term at
//! storage position `k` (1-based, `k >= 2`) looks at part `O_k` and the
//! parts `O_1..O_{k-1}` still assembled when it is removed. Position 1 is
//! never checked, so a single-part sequence satisfies everything.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::model::{Dataset, ModelError, Sequence, TRANSLATIONS};

/// How the "exists a direction" quantifier of the feasibility checks is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityMode {
    /// Every remaining part individually admits some free direction.
    #[default]
    AsWritten,
    /// One direction is free with respect to all remaining parts at once.
    Strict,
}

impl fmt::Display for FeasibilityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeasibilityMode::AsWritten => "as-written",
            FeasibilityMode::Strict => "strict",
        })
    }
}

impl FromStr for FeasibilityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-written" => Ok(FeasibilityMode::AsWritten),
            "strict" => Ok(FeasibilityMode::Strict),
            other => Err(format!("unknown feasibility mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Order,
    Motion,
    Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub criterion: Criterion,
    /// 1-based storage position of the offending part.
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintFlags {
    pub order_feasible: bool,
    pub motion_feasible: bool,
    pub stable: bool,
    pub available: bool,
    pub first_violation: Option<Violation>,
    /// Number of failing per-position terms over all three criteria.
    pub violations: usize,
}

impl ConstraintFlags {
    pub fn feasible(&self) -> bool {
        self.order_feasible && self.motion_feasible
    }
}

/// Per-position outcome of the three criteria (index 0 = position 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionTerms {
    pub order: Vec<bool>,
    pub motion: Vec<bool>,
    pub stable: Vec<bool>,
}

/// Constraint data compiled from a dataset into index-addressed tables.
#[derive(Debug, Clone)]
pub struct ConstraintContext {
    n: usize,
    // bit j set: direction j is interference-free for (remaining i, moving k)
    if_mask: Vec<u8>,
    // bit m set: motion m of k avoids i
    mf_mask: Vec<u64>,
    motion_count: Vec<u32>,
    manual: Vec<bool>,
    contact: Vec<bool>,
}

impl ConstraintContext {
    pub fn new(dataset: &Dataset) -> Self {
        let n = dataset.active_len();
        let m = dataset.matrices();
        let mut if_mask = vec![0u8; n * n];
        let mut contact = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..TRANSLATIONS {
                    if m.x_if[j].get(i, k) == 1 {
                        if_mask[i * n + k] |= 1 << j;
                    }
                }
                contact[i * n + k] = m.x_ct.get(i, k) == 1;
            }
        }
        let mut mf_mask = vec![0u64; n * n];
        let mut motion_count = vec![0u32; n];
        for k in 0..n {
            let motions = dataset.motions().motions_of(dataset.part_order()[k]);
            motion_count[k] = motions.len() as u32;
            for (bit, motion) in motions.iter().enumerate() {
                for i in 0..n {
                    if motion.row[i] == 1 {
                        mf_mask[k * n + i] |= 1 << bit;
                    }
                }
            }
        }
        let manual = (0..n).map(|k| dataset.part_at(k).is_manual()).collect();
        Self {
            n,
            if_mask,
            mf_mask,
            motion_count,
            manual,
            contact,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Order-feasibility term at 0-based position `k` of an index sequence.
    pub fn order_term(&self, idx: &[usize], k: usize, mode: FeasibilityMode) -> bool {
        let moving = idx[k];
        let masks = idx[..k].iter().map(|&i| self.if_mask[i * self.n + moving]);
        match mode {
            FeasibilityMode::AsWritten => masks.into_iter().all(|m| m != 0),
            FeasibilityMode::Strict => masks.fold(0x3f, |acc, m| acc & m) != 0,
        }
    }

    /// Motion-feasibility term; manual parts are exempt.
    pub fn motion_term(&self, idx: &[usize], k: usize, mode: FeasibilityMode) -> bool {
        let moving = idx[k];
        if k == 0 || self.manual[moving] {
            return true;
        }
        let row = &self.mf_mask[moving * self.n..(moving + 1) * self.n];
        match mode {
            FeasibilityMode::AsWritten => idx[..k].iter().all(|&i| row[i] != 0),
            FeasibilityMode::Strict => {
                let count = self.motion_count[moving];
                let all = if count >= 64 { u64::MAX } else { (1u64 << count) - 1 };
                idx[..k].iter().fold(all, |acc, &i| acc & row[i]) != 0
            }
        }
    }

    /// Connection term: the removed part touches something still assembled.
    pub fn stable_term(&self, idx: &[usize], k: usize) -> bool {
        k == 0 || idx[..k].iter().any(|&i| self.contact[i * self.n + idx[k]])
    }

    pub fn terms(&self, idx: &[usize], mode: FeasibilityMode) -> PositionTerms {
        let n = idx.len();
        PositionTerms {
            order: (0..n).map(|k| self.order_term(idx, k, mode)).collect(),
            motion: (0..n).map(|k| self.motion_term(idx, k, mode)).collect(),
            stable: (0..n).map(|k| self.stable_term(idx, k)).collect(),
        }
    }

    /// Refreshes `terms` after positions `k` and `k+1` (0-based) of `idx`
    /// were swapped. Only those two terms can change.
    pub fn update_after_adjacent_swap(
        &self,
        terms: &mut PositionTerms,
        idx: &[usize],
        k: usize,
        mode: FeasibilityMode,
    ) {
        for p in [k, k + 1] {
            terms.order[p] = self.order_term(idx, p, mode);
            terms.motion[p] = self.motion_term(idx, p, mode);
            terms.stable[p] = self.stable_term(idx, p);
        }
    }

    pub fn order_feasible_idx(&self, idx: &[usize], mode: FeasibilityMode) -> bool {
        (1..idx.len()).all(|k| self.order_term(idx, k, mode))
    }

    pub fn motion_feasible_idx(&self, idx: &[usize], mode: FeasibilityMode) -> bool {
        (1..idx.len()).all(|k| self.motion_term(idx, k, mode))
    }

    pub fn stable_idx(&self, idx: &[usize]) -> bool {
        (1..idx.len()).all(|k| self.stable_term(idx, k))
    }

    /// Evaluates every term of all three criteria on an index sequence.
    pub fn check_idx(&self, idx: &[usize], mode: FeasibilityMode) -> ConstraintFlags {
        let (mut order, mut motion, mut stable) = (true, true, true);
        let mut first_violation = None;
        let mut violations = 0;
        for k in 1..idx.len() {
            let outcomes = [
                (self.order_term(idx, k, mode), Criterion::Order, &mut order),
                (self.motion_term(idx, k, mode), Criterion::Motion, &mut motion),
                (self.stable_term(idx, k), Criterion::Stability, &mut stable),
            ];
            for (ok, criterion, flag) in outcomes {
                if !ok {
                    *flag = false;
                    violations += 1;
                    first_violation.get_or_insert(Violation {
                        criterion,
                        position: k + 1,
                    });
                }
            }
        }
        ConstraintFlags {
            order_feasible: order,
            motion_feasible: motion,
            stable,
            available: order && motion && stable,
            first_violation,
            violations,
        }
    }
}

pub fn order_feasible(
    dataset: &Dataset,
    seq: &Sequence,
    mode: FeasibilityMode,
) -> Result<bool, ModelError> {
    let idx = dataset.indices(seq)?;
    Ok(ConstraintContext::new(dataset).order_feasible_idx(&idx, mode))
}

pub fn motion_feasible(
    dataset: &Dataset,
    seq: &Sequence,
    mode: FeasibilityMode,
) -> Result<bool, ModelError> {
    let idx = dataset.indices(seq)?;
    Ok(ConstraintContext::new(dataset).motion_feasible_idx(&idx, mode))
}

pub fn stable(dataset: &Dataset, seq: &Sequence) -> Result<bool, ModelError> {
    let idx = dataset.indices(seq)?;
    Ok(ConstraintContext::new(dataset).stable_idx(&idx))
}

/// One-shot constraint check. For repeated checks build a
/// [`ConstraintContext`] once.
pub fn check(
    dataset: &Dataset,
    seq: &Sequence,
    mode: FeasibilityMode,
) -> Result<ConstraintFlags, ModelError> {
    let idx = dataset.indices(seq)?;
    Ok(ConstraintContext::new(dataset).check_idx(&idx, mode))
}
