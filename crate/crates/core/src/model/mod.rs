//! Domain types: parts, relation matrices, motion tables and sequences.

mod io;
mod labels;
mod matrices;

pub use io::{dataset_digest, load_dataset, read_dataset, save_dataset, write_dataset, SCHEMA_VERSION};
pub use labels::{parse_labels, ParsedLabels, TaskLabel};
pub use matrices::{
    derive_constraint_degree, RelationMatrices, SquareMatrix, CONSTRAINT_DIRECTIONS, TRANSLATIONS,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Motions per part are tracked as bits of a `u64`.
pub const MAX_MOTIONS_PER_PART: usize = 64;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("part name is empty")]
    EmptyPartName,
    #[error("part name {name:?} carries no task label token")]
    MissingTaskLabel { name: String },
    #[error("schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("part id {0} appears more than once")]
    DuplicatePartId(u32),
    #[error("part ids must be contiguous 1..={expected_max}; missing {missing}")]
    NonContiguousIds { expected_max: u32, missing: u32 },
    #[error("parts {0} and {1} are both base-labeled")]
    MultipleBase(u32, u32),
    #[error("part {0} has no task label and is not ignore-labeled")]
    NoTask(u32),
    #[error("part_order: {0}")]
    PartOrder(String),
    #[error("{matrix} has {found} layers, expected {expected}")]
    LayerCount {
        matrix: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{matrix} is {found}x{found}, expected {expected}x{expected}")]
    Dimension {
        matrix: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{matrix} row {row} has the wrong length")]
    RaggedRow { matrix: &'static str, row: usize },
    #[error("{matrix} layer {layer:?} entry ({i},{k}) = {value} is not binary")]
    NonBinary {
        matrix: &'static str,
        layer: Option<usize>,
        i: usize,
        k: usize,
        value: u8,
    },
    #[error("{matrix} layer {layer} is not the transpose of layer {} at ({i},{k})", layer - 3)]
    TransposeViolation {
        matrix: &'static str,
        layer: usize,
        i: usize,
        k: usize,
    },
    #[error("{matrix} is not symmetric at ({i},{k})")]
    Asymmetric { matrix: &'static str, i: usize, k: usize },
    #[error("{matrix} has a nonzero diagonal at ({i},{i})")]
    NonZeroDiagonal { matrix: &'static str, i: usize },
    #[error("x_cs({i},{k}) = {found} but the constraint-free layers give {expected}")]
    ConstraintDegreeMismatch { i: usize, k: usize, expected: u8, found: u8 },
    #[error("parts at ({i},{k}) are in contact but have zero constraint degree")]
    ContactWithoutConstraint { i: usize, k: usize },
    #[error("motion table: {0}")]
    Motion(String),
    #[error("sequence: {0}")]
    Sequence(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed dataset: {0}")]
    Json(#[from] serde_json::Error),
}

/// Identifier of a part, `1..=N_total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartId(pub u32);

impl fmt::Display for PartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub id: PartId,
    pub name: String,
    pub task: Option<TaskLabel>,
    pub priority: bool,
    pub base: bool,
    pub ignore: bool,
    /// Center of mass in millimetres.
    pub com: [f64; 3],
    pub eef: Option<String>,
    /// Size used to pick the CCG root when no part is base-labeled.
    pub size: Option<f64>,
}

impl Part {
    /// Builds a part whose labels come from its name.
    pub fn from_name(id: u32, name: &str, com: [f64; 3]) -> Result<Self, ModelError> {
        let labels = parse_labels(name)?;
        Ok(Self {
            id: PartId(id),
            name: name.to_string(),
            task: labels.task,
            priority: labels.priority,
            base: labels.base,
            ignore: labels.ignore,
            com,
            eef: None,
            size: None,
        })
    }

    pub fn is_manual(&self) -> bool {
        self.task == Some(TaskLabel::Manual)
    }
}

/// All parts of a product, sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct PartCatalog {
    parts: Vec<Part>,
}

impl PartCatalog {
    pub fn new(mut parts: Vec<Part>) -> Result<Self, ModelError> {
        parts.sort_by_key(|p| p.id);
        for w in parts.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicatePartId(w[0].id.0));
            }
        }
        for (expected, p) in (1u32..).zip(&parts) {
            if p.id.0 != expected {
                return Err(ModelError::NonContiguousIds {
                    expected_max: parts.len() as u32,
                    missing: expected,
                });
            }
        }
        let mut base = parts.iter().filter(|p| p.base);
        if let (Some(a), Some(b)) = (base.next(), base.next()) {
            return Err(ModelError::MultipleBase(a.id.0, b.id.0));
        }
        if let Some(p) = parts.iter().find(|p| p.task.is_none() && !p.ignore) {
            return Err(ModelError::NoTask(p.id.0));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn get(&self, id: PartId) -> Option<&Part> {
        (id.0 as usize)
            .checked_sub(1)
            .and_then(|i| self.parts.get(i))
    }

    /// Ids of parts that take part in sequences.
    pub fn active_ids(&self) -> Vec<PartId> {
        self.parts.iter().filter(|p| !p.ignore).map(|p| p.id).collect()
    }

    pub fn base(&self) -> Option<&Part> {
        self.parts.iter().find(|p| p.base)
    }
}

/// One candidate removal motion of a part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motion {
    pub id: u32,
    pub kind: String,
    /// Indexed like `part_order`; 1 = the motion avoids that part.
    pub row: Vec<u8>,
}

/// Candidate motions per part. Parts without an entry have no motion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MotionTable {
    pub motions: BTreeMap<PartId, Vec<Motion>>,
}

impl MotionTable {
    pub fn motions_of(&self, id: PartId) -> &[Motion] {
        self.motions.get(&id).map_or(&[], Vec::as_slice)
    }
}

/// A disassembly order in storage convention: position 1 (index 0) holds
/// the part removed LAST, the final position holds the part removed first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence {
    pub order: Vec<PartId>,
}

impl Sequence {
    pub fn new(order: Vec<PartId>) -> Self {
        Self { order }
    }

    /// Builds the storage form from a first-removed-first list.
    pub fn from_removal_order(mut removal: Vec<PartId>) -> Self {
        removal.reverse();
        Self { order: removal }
    }

    /// Parts in the order they are taken off the product.
    pub fn removal_order(&self) -> impl Iterator<Item = PartId> + '_ {
        self.order.iter().rev().copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based storage position of `id`.
    pub fn position(&self, id: PartId) -> Option<usize> {
        self.order.iter().position(|&p| p == id).map(|i| i + 1)
    }
}

/// A validated product: catalog, relation matrices and motion table,
/// with matrices indexed by `part_order`.
#[derive(Debug, Clone)]
pub struct Dataset {
    catalog: PartCatalog,
    part_order: Vec<PartId>,
    matrices: RelationMatrices,
    motions: MotionTable,
    index_of: Vec<Option<usize>>,
}

impl Dataset {
    pub fn new(
        catalog: PartCatalog,
        part_order: Vec<PartId>,
        matrices: RelationMatrices,
        motions: MotionTable,
    ) -> Result<Self, ModelError> {
        let mut index_of = vec![None; catalog.len() + 1];
        for (idx, id) in part_order.iter().enumerate() {
            let part = catalog
                .get(*id)
                .ok_or_else(|| ModelError::PartOrder(format!("unknown part {id}")))?;
            if part.ignore {
                return Err(ModelError::PartOrder(format!("{id} is ignore-labeled")));
            }
            if index_of[id.0 as usize].replace(idx).is_some() {
                return Err(ModelError::PartOrder(format!("{id} listed twice")));
            }
        }
        if let Some(p) = catalog
            .parts()
            .iter()
            .find(|p| !p.ignore && index_of[p.id.0 as usize].is_none())
        {
            return Err(ModelError::PartOrder(format!("{} is missing", p.id)));
        }
        let n = part_order.len();
        if matrices.size() != n {
            return Err(ModelError::Dimension {
                matrix: "x_ct",
                expected: n,
                found: matrices.size(),
            });
        }
        matrices.validate()?;
        for (id, list) in &motions.motions {
            let part = catalog
                .get(*id)
                .ok_or_else(|| ModelError::Motion(format!("unknown part {id}")))?;
            if part.ignore {
                return Err(ModelError::Motion(format!("{id} is ignore-labeled")));
            }
            if list.len() > MAX_MOTIONS_PER_PART {
                return Err(ModelError::Motion(format!(
                    "{id} has {} motions (max {MAX_MOTIONS_PER_PART})",
                    list.len()
                )));
            }
            for m in list {
                if m.row.len() != n {
                    return Err(ModelError::Motion(format!(
                        "{id} motion {} row has {} entries, expected {n}",
                        m.id,
                        m.row.len()
                    )));
                }
                if let Some(col) = m.row.iter().position(|&v| v > 1) {
                    return Err(ModelError::Motion(format!(
                        "{id} motion {} entry {col} is not binary",
                        m.id
                    )));
                }
            }
        }
        Ok(Self {
            catalog,
            part_order,
            matrices,
            motions,
            index_of,
        })
    }

    pub fn catalog(&self) -> &PartCatalog {
        &self.catalog
    }

    pub fn part_order(&self) -> &[PartId] {
        &self.part_order
    }

    pub fn matrices(&self) -> &RelationMatrices {
        &self.matrices
    }

    pub fn motions(&self) -> &MotionTable {
        &self.motions
    }

    /// Number of non-ignored parts, i.e. the length of every sequence.
    pub fn active_len(&self) -> usize {
        self.part_order.len()
    }

    pub fn index_of(&self, id: PartId) -> Option<usize> {
        self.index_of.get(id.0 as usize).copied().flatten()
    }

    pub fn part_at(&self, index: usize) -> &Part {
        self.catalog
            .get(self.part_order[index])
            .expect("part_order validated against catalog")
    }

    /// Maps a sequence onto matrix indices, checking it is a permutation of
    /// the active parts.
    pub fn indices(&self, seq: &Sequence) -> Result<Vec<usize>, ModelError> {
        let n = self.active_len();
        if seq.len() != n {
            return Err(ModelError::Sequence(format!(
                "length {} but {n} active parts",
                seq.len()
            )));
        }
        let mut seen = vec![false; n];
        seq.order
            .iter()
            .map(|&id| {
                let idx = self
                    .index_of(id)
                    .ok_or_else(|| ModelError::Sequence(format!("{id} is not an active part")))?;
                if std::mem::replace(&mut seen[idx], true) {
                    return Err(ModelError::Sequence(format!("{id} appears twice")));
                }
                Ok(idx)
            })
            .collect()
    }

    /// Task labels of a sequence, in storage order.
    pub fn task_labels(&self, seq: &Sequence) -> Vec<Option<TaskLabel>> {
        seq.order
            .iter()
            .map(|&id| self.catalog.get(id).and_then(|p| p.task))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(id: u32, name: &str) -> Part {
        Part::from_name(id, name, [0.0; 3]).unwrap()
    }

    #[test]
    fn catalog_rejects_gaps_and_duplicates() {
        let err = PartCatalog::new(vec![part(1, "a_plate"), part(3, "b_plate")]).unwrap_err();
        assert!(matches!(err, ModelError::NonContiguousIds { missing: 2, .. }));
        let err = PartCatalog::new(vec![part(1, "a_plate"), part(1, "b_plate")]).unwrap_err();
        assert!(matches!(err, ModelError::DuplicatePartId(1)));
    }

    #[test]
    fn catalog_rejects_two_bases() {
        let err = PartCatalog::new(vec![part(1, "a_plate_base"), part(2, "b_plate_base")])
            .unwrap_err();
        assert!(matches!(err, ModelError::MultipleBase(1, 2)));
    }

    #[test]
    fn ignored_parts_are_not_active() {
        let cat = PartCatalog::new(vec![
            part(1, "a_plate_base"),
            part(2, "spacer_ignore"),
            part(3, "c_screw"),
        ])
        .unwrap();
        assert_eq!(cat.active_ids(), vec![PartId(1), PartId(3)]);
        assert_eq!(cat.base().unwrap().id, PartId(1));
    }

    #[test]
    fn removal_order_is_reversed_storage() {
        let s = Sequence::from_removal_order(vec![PartId(3), PartId(2), PartId(1)]);
        assert_eq!(s.order, vec![PartId(1), PartId(2), PartId(3)]);
        assert_eq!(s.removal_order().collect::<Vec<_>>()[0], PartId(3));
        assert_eq!(s.position(PartId(3)), Some(3));
    }
}
