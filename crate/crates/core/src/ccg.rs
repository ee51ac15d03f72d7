//! Contact-and-connection graph and chromosome initializers.
//!
//! All initializers return index sequences over the dataset's
//! `part_order`, in storage order (index 0 is removed last).

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{ConstraintContext, FeasibilityMode};
use crate::model::{Dataset, PartId, Sequence};

pub const DEFAULT_MAX_PASSES: usize = 50;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CcgError {
    #[error("product has no active parts")]
    Empty,
    #[error("contact graph is disconnected; unreachable from root {root}: {unreachable:?}")]
    DisconnectedProduct { root: PartId, unreachable: Vec<PartId> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    /// Incident to a fixing part.
    Connection,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ccg {
    ids: Vec<PartId>,
    fixing: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
    root: usize,
}

impl Ccg {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[PartId] {
        &self.ids
    }

    pub fn is_fixing(&self, node: usize) -> bool {
        self.fixing[node]
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Index of the root node in `part_order`.
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_id(&self) -> PartId {
        self.ids[self.root]
    }

    /// Unordered edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize, EdgeClass)> {
        let mut out = Vec::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            for &b in list.iter().filter(|&&b| b > a) {
                let class = if self.fixing[a] || self.fixing[b] {
                    EdgeClass::Connection
                } else {
                    EdgeClass::Plain
                };
                out.push((a, b, class));
            }
        }
        out
    }

    /// Graphviz rendering; connection edges are drawn red.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph ccg {\n");
        for (i, id) in self.ids.iter().enumerate() {
            let mut attrs = Vec::new();
            if self.fixing[i] {
                attrs.push("shape=diamond");
            }
            if i == self.root {
                attrs.push("peripheries=2");
            }
            s.push_str(&format!("  {id}"));
            if !attrs.is_empty() {
                s.push_str(&format!(" [{}]", attrs.join(", ")));
            }
            s.push_str(";\n");
        }
        for (a, b, class) in self.edges() {
            let style = match class {
                EdgeClass::Connection => " [color=red]",
                EdgeClass::Plain => "",
            };
            s.push_str(&format!("  {} -- {}{style};\n", self.ids[a], self.ids[b]));
        }
        s.push_str("}\n");
        s
    }

    /// Hop distances from the root over nodes still `alive`; `None` when
    /// unreachable.
    fn distances(&self, alive: &[bool]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::from([self.root]);
        dist[self.root] = Some(0);
        while let Some(a) = queue.pop_front() {
            let d = dist[a].unwrap_or(0);
            for &b in &self.adjacency[a] {
                if alive[b] && dist[b].is_none() {
                    dist[b] = Some(d + 1);
                    queue.push_back(b);
                }
            }
        }
        dist
    }
}

/// Builds the graph over the dataset's active parts.
///
/// The root is the base-labeled part, else the part with the largest
/// `size` (lowest id on ties, parts without a size count as 0).
pub fn build_ccg(dataset: &Dataset) -> Result<Ccg, CcgError> {
    let n = dataset.active_len();
    if n == 0 {
        return Err(CcgError::Empty);
    }
    let ids = dataset.part_order().to_vec();
    let fixing = (0..n)
        .map(|i| dataset.part_at(i).task.is_some_and(|t| t.is_fixing()))
        .collect();
    let ct = &dataset.matrices().x_ct;
    let adjacency = (0..n)
        .map(|a| (0..n).filter(|&b| b != a && ct.get(a, b) == 1).collect())
        .collect();
    let root = (0..n).find(|&i| dataset.part_at(i).base).unwrap_or_else(|| {
        let size = |i: usize| dataset.part_at(i).size.unwrap_or(0.0);
        (0..n).fold(0, |best, i| {
            let (s, b) = (size(i), size(best));
            if s > b || (s == b && ids[i] < ids[best]) {
                i
            } else {
                best
            }
        })
    });
    let ccg = Ccg {
        ids,
        fixing,
        adjacency,
        root,
    };
    let dist = ccg.distances(&vec![true; n]);
    let unreachable: Vec<PartId> = (0..n).filter(|&i| dist[i].is_none()).map(|i| ccg.ids[i]).collect();
    if !unreachable.is_empty() {
        return Err(CcgError::DisconnectedProduct {
            root: ccg.root_id(),
            unreachable,
        });
    }
    Ok(ccg)
}

/// CCG-based initialization. Nodes cut off from the root by earlier
/// removals count as farthest.
pub fn ccgi_order<R: Rng + ?Sized>(ccg: &Ccg, rng: &mut R) -> Vec<usize> {
    let n = ccg.len();
    let mut alive = vec![true; n];
    let mut removal = Vec::with_capacity(n);
    for _ in 1..n {
        let dist = ccg.distances(&alive);
        let key = |i: usize| dist[i].unwrap_or(usize::MAX);
        let far = (0..n)
            .filter(|&i| alive[i] && i != ccg.root)
            .map(key)
            .max()
            .expect("a non-root node is alive");
        let candidates: Vec<usize> = (0..n)
            .filter(|&i| alive[i] && i != ccg.root && key(i) == far)
            .collect();
        let picked = *candidates.choose(rng).expect("non-empty");
        let removed = if ccg.fixing[picked] {
            picked
        } else {
            let fasteners: Vec<usize> = ccg.adjacency[picked]
                .iter()
                .copied()
                .filter(|&b| alive[b] && ccg.fixing[b] && b != ccg.root)
                .collect();
            fasteners.choose(rng).copied().unwrap_or(picked)
        };
        alive[removed] = false;
        removal.push(removed);
    }
    removal.push(ccg.root);
    removal.reverse();
    removal
}

pub fn ccgi_init<R: Rng + ?Sized>(dataset: &Dataset, ccg: &Ccg, rng: &mut R) -> Sequence {
    to_sequence(dataset, &ccgi_order(ccg, rng))
}

pub fn random_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

pub fn random_init<R: Rng + ?Sized>(dataset: &Dataset, rng: &mut R) -> Sequence {
    to_sequence(dataset, &random_order(dataset.active_len(), rng))
}

/// Swap-based repair of a random permutation. Each pass scans positions
/// from last-stored to second and swaps every violating position with a
/// random earlier one. Stops after a pass without swaps.
pub fn rearrange<R: Rng + ?Sized>(
    ctx: &ConstraintContext,
    mode: FeasibilityMode,
    with_stability: bool,
    max_passes: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut idx = random_order(ctx.len(), rng);
    for _ in 0..max_passes {
        let mut swapped = false;
        for k in (1..idx.len()).rev() {
            let ok = ctx.order_term(&idx, k, mode) && (!with_stability || ctx.stable_term(&idx, k));
            if !ok {
                let j = rng.gen_range(0..k);
                idx.swap(j, k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    idx
}

pub fn fr_init<R: Rng + ?Sized>(dataset: &Dataset, mode: FeasibilityMode, max_passes: usize, rng: &mut R) -> Sequence {
    let ctx = ConstraintContext::new(dataset);
    to_sequence(dataset, &rearrange(&ctx, mode, false, max_passes, rng))
}

pub fn sfr_init<R: Rng + ?Sized>(dataset: &Dataset, mode: FeasibilityMode, max_passes: usize, rng: &mut R) -> Sequence {
    let ctx = ConstraintContext::new(dataset);
    to_sequence(dataset, &rearrange(&ctx, mode, true, max_passes, rng))
}

fn to_sequence(dataset: &Dataset, idx: &[usize]) -> Sequence {
    Sequence::new(idx.iter().map(|&i| dataset.part_order()[i]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initializer {
    #[serde(rename = "ri")]
    Random,
    #[serde(rename = "fr")]
    Feasibility,
    #[serde(rename = "sfr")]
    StabilityFeasibility,
    #[default]
    #[serde(rename = "ccgi")]
    Ccg,
}

impl Initializer {
    pub const ALL: [Initializer; 4] = [
        Initializer::Random,
        Initializer::Feasibility,
        Initializer::StabilityFeasibility,
        Initializer::Ccg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Initializer::Random => "ri",
            Initializer::Feasibility => "fr",
            Initializer::StabilityFeasibility => "sfr",
            Initializer::Ccg => "ccgi",
        }
    }
}

impl fmt::Display for Initializer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Initializer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Initializer::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown initializer `{s}` (expected ri, fr, sfr or ccgi)"))
    }
}

/// Everything an initializer needs, compiled once per dataset.
#[derive(Debug, Clone)]
pub struct Seeder {
    method: Initializer,
    ccg: Option<Ccg>,
    constraints: ConstraintContext,
    mode: FeasibilityMode,
    max_passes: usize,
}

impl Seeder {
    pub fn new(
        dataset: &Dataset,
        method: Initializer,
        mode: FeasibilityMode,
        max_passes: usize,
    ) -> Result<Self, CcgError> {
        let ccg = match method {
            Initializer::Ccg => Some(build_ccg(dataset)?),
            _ => None,
        };
        Ok(Self {
            method,
            ccg,
            constraints: ConstraintContext::new(dataset),
            mode,
            max_passes,
        })
    }

    pub fn method(&self) -> Initializer {
        self.method
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        match (self.method, &self.ccg) {
            (Initializer::Ccg, Some(ccg)) => ccgi_order(ccg, rng),
            (Initializer::Feasibility, _) => {
                rearrange(&self.constraints, self.mode, false, self.max_passes, rng)
            }
            (Initializer::StabilityFeasibility, _) => {
                rearrange(&self.constraints, self.mode, true, self.max_passes, rng)
            }
            _ => random_order(self.constraints.len(), rng),
        }
    }
}
