//! Displacement-based geometric simulation on axis-aligned voxel assemblies.
//!
//! Parts are sets of integer lattice cells. Every relation matrix is
//! produced by moving one part cell-step by cell-step and testing overlap
//! with another, so thin walls can never be tunnelled through.

mod synthetic;

pub use synthetic::{build_dataset, generate_synthetic, synthetic_dataset, SimParams, SyntheticSpec};

use rayon::prelude::*;
use std::collections::HashSet;
use thiserror::Error;

use crate::model::{Motion, MotionTable, PartId, SquareMatrix, CONSTRAINT_DIRECTIONS};

pub type Cell = [i32; 3];

const AXIS_NAMES: [&str; 6] = ["+x", "+y", "+z", "-x", "-y", "-z"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssemblyError {
    #[error("part {0} has no cells")]
    EmptyPart(PartId),
    #[error("parts {a} and {b} both occupy cell {cell:?}")]
    Overlap { a: PartId, b: PartId, cell: Cell },
    #[error("part {0} leaves the workspace bounds")]
    OutOfBounds(PartId),
}

/// Inclusive integer box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellBox {
    pub min: Cell,
    pub max: Cell,
}

impl CellBox {
    pub fn contains(&self, c: &Cell) -> bool {
        (0..3).all(|a| self.min[a] <= c[a] && c[a] <= self.max[a])
    }

    fn around<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> Option<CellBox> {
        cells.into_iter().fold(None, |acc, c| {
            Some(match acc {
                None => CellBox { min: *c, max: *c },
                Some(b) => CellBox {
                    min: std::array::from_fn(|a| b.min[a].min(c[a])),
                    max: std::array::from_fn(|a| b.max[a].max(c[a])),
                },
            })
        })
    }

    fn union(&self, other: &CellBox) -> CellBox {
        CellBox {
            min: std::array::from_fn(|a| self.min[a].min(other.min[a])),
            max: std::array::from_fn(|a| self.max[a].max(other.max[a])),
        }
    }

    fn extent(&self, axis: usize) -> i32 {
        self.max[axis] - self.min[axis] + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoxelPart {
    pub id: PartId,
    cells: Vec<Cell>,
    occupied: HashSet<Cell>,
    bbox: CellBox,
}

impl VoxelPart {
    pub fn new(id: PartId, mut cells: Vec<Cell>) -> Result<Self, AssemblyError> {
        cells.sort_unstable();
        cells.dedup();
        let bbox = CellBox::around(&cells).ok_or(AssemblyError::EmptyPart(id))?;
        Ok(Self {
            id,
            occupied: cells.iter().copied().collect(),
            cells,
            bbox,
        })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn volume(&self) -> usize {
        self.cells.len()
    }

    pub fn bbox(&self) -> CellBox {
        self.bbox
    }

    /// Center of mass in cell coordinates (cell `c` spans `[c, c+1)`).
    pub fn centroid(&self) -> [f64; 3] {
        let n = self.cells.len() as f64;
        std::array::from_fn(|a| self.cells.iter().map(|c| c[a] as f64 + 0.5).sum::<f64>() / n)
    }

    fn hits(&self, other: &VoxelPart, offset: Cell) -> bool {
        let apart = (0..3).any(|a| {
            self.bbox.max[a] + offset[a] < other.bbox.min[a] || self.bbox.min[a] + offset[a] > other.bbox.max[a]
        });
        if apart {
            return false;
        }
        if self.cells.len() <= other.cells.len() {
            self.cells
                .iter()
                .any(|c| other.occupied.contains(&[c[0] + offset[0], c[1] + offset[1], c[2] + offset[2]]))
        } else {
            other
                .cells
                .iter()
                .any(|c| self.occupied.contains(&[c[0] - offset[0], c[1] - offset[1], c[2] - offset[2]]))
        }
    }
}

/// An assembled product on a voxel lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelAssembly {
    pitch_mm: f64,
    parts: Vec<VoxelPart>,
    workspace: CellBox,
}

/// Unit step of translation direction `j` (+x, +y, +z, -x, -y, -z).
fn unit(j: usize) -> Cell {
    let mut d = [0; 3];
    d[j % 3] = if j < 3 { 1 } else { -1 };
    d
}

fn scaled(d: Cell, s: i32) -> Cell {
    [d[0] * s, d[1] * s, d[2] * s]
}

impl VoxelAssembly {
    pub fn new(pitch_mm: f64, parts: Vec<VoxelPart>, workspace: CellBox) -> Result<Self, AssemblyError> {
        let mut owner = std::collections::HashMap::new();
        for p in &parts {
            for c in p.cells() {
                if let Some(a) = owner.insert(*c, p.id) {
                    return Err(AssemblyError::Overlap {
                        a,
                        b: p.id,
                        cell: *c,
                    });
                }
                if !workspace.contains(c) {
                    return Err(AssemblyError::OutOfBounds(p.id));
                }
            }
        }
        Ok(Self {
            pitch_mm,
            parts,
            workspace,
        })
    }

    pub fn pitch_mm(&self) -> f64 {
        self.pitch_mm
    }

    pub fn parts(&self) -> &[VoxelPart] {
        &self.parts
    }

    pub fn workspace(&self) -> CellBox {
        self.workspace
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Keeps only the listed parts, in the given order.
    pub fn subset(&self, ids: &[PartId]) -> VoxelAssembly {
        VoxelAssembly {
            pitch_mm: self.pitch_mm,
            parts: ids
                .iter()
                .filter_map(|id| self.parts.iter().find(|p| p.id == *id).cloned())
                .collect(),
            workspace: self.workspace,
        }
    }

    /// Center of mass in millimetres.
    pub fn com_mm(&self, index: usize) -> [f64; 3] {
        self.parts[index].centroid().map(|v| v * self.pitch_mm)
    }

    fn bbox(&self) -> Option<CellBox> {
        self.parts.iter().map(VoxelPart::bbox).reduce(|a, b| a.union(&b))
    }

    /// Whether `moving`, swept one cell at a time for `steps` steps along
    /// direction `j`, ever overlaps `fixed`.
    fn sweep_blocked(&self, fixed: usize, moving: usize, j: usize, steps: i32) -> bool {
        let d = unit(j);
        (1..=steps).any(|s| self.parts[moving].hits(&self.parts[fixed], scaled(d, s)))
    }

    /// Whether `moving` overlaps `fixed` after a single jump of `steps` cells.
    pub fn teleport_blocked(&self, fixed: usize, moving: usize, j: usize, steps: i32) -> bool {
        self.parts[moving].hits(&self.parts[fixed], scaled(unit(j), steps))
    }

    fn pairwise(&self, f: impl Fn(usize, usize) -> u8 + Sync) -> SquareMatrix<u8> {
        let n = self.parts.len();
        let values: Vec<u8> = (0..n * n)
            .into_par_iter()
            .map(|e| if e / n == e % n { 0 } else { f(e / n, e % n) })
            .collect();
        let mut m = SquareMatrix::new(n);
        for (e, v) in values.into_iter().enumerate() {
            m.set(e / n, e % n, v);
        }
        m
    }

    fn translation_layers(&self, steps: impl Fn(usize, usize, usize) -> i32 + Sync) -> Vec<SquareMatrix<u8>> {
        let positive: Vec<_> = (0..3)
            .map(|j| {
                self.pairwise(|i, k| u8::from(!self.sweep_blocked(i, k, j, steps(i, k, j))))
            })
            .collect();
        let negative: Vec<_> = positive.iter().map(SquareMatrix::transpose).collect();
        positive.into_iter().chain(negative).collect()
    }

    /// Interference-free layers: entry `(i,k)` of layer `j` is 1 when part
    /// `k` can travel along direction `j` across the whole bounding box of
    /// the pair without touching part `i`.
    pub fn interference_free_matrices(&self) -> Vec<SquareMatrix<u8>> {
        self.translation_layers(|i, k, j| {
            self.parts[i].bbox().union(&self.parts[k].bbox()).extent(j % 3)
        })
    }

    /// Constraint-free layers: 6 translations by `clearance_mm` and 6 small
    /// rotations by `angle_deg` about the x, y and z axes through each
    /// part's center of mass. A rotation entry is free only when turning
    /// either part of the pair clears the other.
    pub fn constraint_free_matrices(&self, clearance_mm: f64, angle_deg: f64) -> Vec<SquareMatrix<u8>> {
        let steps = ((clearance_mm / self.pitch_mm).round() as i32).max(1);
        let mut layers = self.translation_layers(|_, _, _| steps);
        let n = self.parts.len();
        let rotated: Vec<Vec<HashSet<Cell>>> = (0..6)
            .map(|r| {
                let angle = if r < 3 { angle_deg } else { -angle_deg }.to_radians();
                self.parts.iter().map(|p| rotate_cells(p, r % 3, angle)).collect()
            })
            .collect();
        for turned in &rotated {
            let clear = |moving: usize, fixed: usize| {
                turned[moving].iter().all(|c| !self.parts[fixed].occupied.contains(c))
            };
            let mut m = SquareMatrix::new(n);
            for i in 0..n {
                for k in i + 1..n {
                    let free = u8::from(clear(k, i) && clear(i, k));
                    m.set(i, k, free);
                    m.set(k, i, free);
                }
            }
            layers.push(m);
        }
        debug_assert_eq!(layers.len(), CONSTRAINT_DIRECTIONS);
        layers
    }

    /// Face adjacency between parts.
    pub fn contact_matrix(&self) -> SquareMatrix<u8> {
        self.pairwise(|i, k| u8::from((0..6).any(|j| self.parts[k].hits(&self.parts[i], unit(j)))))
    }

    /// One straight-line extraction per axis direction for every part,
    /// kept only if the part stays inside the workspace until it has left
    /// the assembly's bounding box. Rows follow the assembly's part order.
    pub fn synth_motion_table(&self) -> MotionTable {
        let Some(bbox) = self.bbox() else {
            return MotionTable::default();
        };
        let n = self.parts.len();
        let mut table = MotionTable::default();
        for (i, part) in self.parts.iter().enumerate() {
            let mut motions = Vec::new();
            for (j, kind) in AXIS_NAMES.iter().enumerate() {
                let axis = j % 3;
                let steps = if j < 3 {
                    bbox.max[axis] - part.bbox().min[axis] + 1
                } else {
                    part.bbox().max[axis] - bbox.min[axis] + 1
                };
                let d = unit(j);
                let in_bounds = (1..=steps).all(|s| {
                    let off = scaled(d, s);
                    part.cells()
                        .iter()
                        .all(|c| self.workspace.contains(&[c[0] + off[0], c[1] + off[1], c[2] + off[2]]))
                });
                if !in_bounds {
                    continue;
                }
                let row = (0..n)
                    .map(|k| u8::from(k == i || !self.sweep_blocked(k, i, j, steps)))
                    .collect();
                motions.push(Motion {
                    id: j as u32,
                    kind: (*kind).to_string(),
                    row,
                });
            }
            table.motions.insert(part.id, motions);
        }
        table
    }
}

/// Rotates a part about `axis` through its centroid, resampling each cell
/// center to the nearest lattice cell.
fn rotate_cells(part: &VoxelPart, axis: usize, angle: f64) -> HashSet<Cell> {
    let center = part.centroid();
    let (s, c) = angle.sin_cos();
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    part.cells()
        .iter()
        .map(|cell| {
            let p: [f64; 3] = std::array::from_fn(|a| cell[a] as f64 + 0.5 - center[a]);
            let mut q = p;
            q[u] = c * p[u] - s * p[v];
            q[v] = s * p[u] + c * p[v];
            std::array::from_fn(|a| (q[a] + center[a]).floor() as i32)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn boxed(id: u32, min: Cell, max: Cell) -> VoxelPart {
        let mut cells = Vec::new();
        for x in min[0]..=max[0] {
            for y in min[1]..=max[1] {
                for z in min[2]..=max[2] {
                    cells.push([x, y, z]);
                }
            }
        }
        VoxelPart::new(PartId(id), cells).unwrap()
    }

    fn assembly(parts: Vec<VoxelPart>) -> VoxelAssembly {
        let ws = CellBox {
            min: [-40, -40, 0],
            max: [40, 40, 40],
        };
        VoxelAssembly::new(1.0, parts, ws).unwrap()
    }

    #[test]
    fn side_by_side_cubes() {
        let a = assembly(vec![boxed(1, [0, 0, 0], [1, 1, 1]), boxed(2, [2, 0, 0], [3, 1, 1])]);
        let x_if = a.interference_free_matrices();
        // left cube (0) moving relative to right cube (1): entry (1, 0)
        assert_eq!(x_if[0].get(1, 0), 0, "+x blocked");
        assert_eq!(x_if[3].get(1, 0), 1, "-x free");
        for j in [1, 2, 4, 5] {
            assert_eq!(x_if[j].get(1, 0), 1);
            assert_eq!(x_if[j].get(0, 1), 1);
        }
        assert_eq!(a.contact_matrix().get(0, 1), 1);
    }

    #[test]
    fn peg_in_sleeve_only_leaves_upwards() {
        // sleeve: 3x3x3 block with a 1x1 hole bored from the top, closed at the bottom
        let mut sleeve = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    if !(x == 1 && y == 1 && z >= 1) {
                        sleeve.push([x, y, z]);
                    }
                }
            }
        }
        let sleeve = VoxelPart::new(PartId(1), sleeve).unwrap();
        let peg = VoxelPart::new(PartId(2), vec![[1, 1, 1], [1, 1, 2], [1, 1, 3]]).unwrap();
        let a = assembly(vec![sleeve, peg]);
        let x_if = a.interference_free_matrices();
        let free: Vec<usize> = (0..6).filter(|&j| x_if[j].get(0, 1) == 1).collect();
        // brute-force oracle: shift peg by s cells, s up to the pair extent
        let oracle: Vec<usize> = (0..6)
            .filter(|&j| (1..=4).all(|s| !a.teleport_blocked(0, 1, j, s)))
            .collect();
        assert_eq!(free, vec![2]);
        assert_eq!(free, oracle);
    }

    #[test]
    fn distant_parts_are_fully_free() {
        let a = assembly(vec![boxed(1, [0, 0, 0], [0, 0, 0]), boxed(2, [10, 10, 10], [10, 10, 10])]);
        let cf = a.constraint_free_matrices(1.0, 5.0);
        assert!(cf.iter().all(|l| l.get(0, 1) == 1 && l.get(1, 0) == 1));
        assert_eq!(a.contact_matrix().get(0, 1), 0);
    }

    #[test]
    fn screw_through_plate_is_held_in_all_but_extraction() {
        // plate 3x3x1 with a center hole; screw shaft through it under a flange head
        let plate: Vec<Cell> = (0..3)
            .flat_map(|x| (0..3).map(move |y| [x, y, 1]))
            .filter(|c| c[..2] != [1, 1])
            .collect();
        let base = boxed(1, [0, 0, 0], [2, 2, 0]);
        let plate = VoxelPart::new(PartId(2), plate).unwrap();
        let screw =
            VoxelPart::new(PartId(3), vec![[1, 1, 1], [0, 1, 2], [1, 1, 2], [2, 1, 2]]).unwrap();
        let a = assembly(vec![base, plate, screw]);
        let cf = a.constraint_free_matrices(1.0, 5.0);
        // screw (2) relative to plate (1): only extraction along +z
        let free: Vec<usize> = (0..6).filter(|&j| cf[j].get(1, 2) == 1).collect();
        assert_eq!(free, vec![2]);
        let free: Vec<usize> = (0..6).filter(|&j| cf[j].get(0, 2) == 1).collect();
        assert_eq!(free, vec![0, 1, 2, 3, 4]);
        let cs = crate::model::derive_constraint_degree(&cf);
        assert!(cs.get(1, 2) >= 5);
        assert_eq!(cs.get(1, 2), cs.get(2, 1));
        assert!(cs.get(1, 2) > cs.get(0, 2));
    }

    #[test]
    fn stacked_and_separated_contact() {
        let a = assembly(vec![
            boxed(1, [0, 0, 0], [1, 1, 0]),
            boxed(2, [0, 0, 1], [1, 1, 1]),
            boxed(3, [5, 5, 0], [5, 5, 0]),
        ]);
        let ct = a.contact_matrix();
        assert_eq!(ct.get(0, 1), 1);
        assert_eq!(ct.get(0, 2), 0);
    }

    #[test]
    fn tower_motions() {
        let a = assembly(vec![
            boxed(1, [0, 0, 0], [1, 1, 0]),
            boxed(2, [0, 0, 1], [1, 1, 1]),
            boxed(3, [0, 0, 2], [1, 1, 2]),
        ]);
        let t = a.synth_motion_table();
        let top = t.motions_of(PartId(3));
        let up = top.iter().find(|m| m.kind == "+z").unwrap();
        assert_eq!(up.row, vec![1, 1, 1]);
        // nothing may go down through the workspace floor
        assert!(t.motions.values().flatten().all(|m| m.kind != "-z"));
        // plain slabs can slide out sideways but not up
        let bottom = t.motions_of(PartId(1));
        let row = |kind: &str| bottom.iter().find(|m| m.kind == kind).unwrap().row.clone();
        assert_eq!(row("+z"), vec![1, 0, 0]);
        assert_eq!(row("+x"), vec![1, 1, 1]);
    }

    #[test]
    fn overlapping_parts_are_rejected() {
        let err = VoxelAssembly::new(
            1.0,
            vec![boxed(1, [0, 0, 0], [1, 1, 1]), boxed(2, [1, 1, 1], [2, 2, 2])],
            CellBox {
                min: [0, 0, 0],
                max: [9, 9, 9],
            },
        )
        .unwrap_err();
        assert!(matches!(err, AssemblyError::Overlap { .. }));
        assert!(VoxelPart::new(PartId(1), vec![]).is_err());
    }

    fn random_assembly(seeds: &[(i32, i32, i32, i32)]) -> VoxelAssembly {
        // boxes on a coarse grid so they never overlap
        let parts = seeds
            .iter()
            .enumerate()
            .map(|(i, &(x, y, w, h))| {
                let ox = (i as i32 % 3) * 4 + x % 2;
                let oy = (i as i32 / 3) * 4 + y % 2;
                boxed(i as u32 + 1, [ox, oy, 0], [ox + w % 3, oy + h % 3, 1])
            })
            .collect();
        assembly(parts)
    }

    proptest! {
        #[test]
        fn negative_layers_are_transposes(seeds in proptest::collection::vec((0i32..4, 0i32..4, 0i32..3, 0i32..3), 2..7)) {
            let a = random_assembly(&seeds);
            for layers in [a.interference_free_matrices(), a.constraint_free_matrices(1.0, 5.0)] {
                for j in 0..3 {
                    prop_assert_eq!(&layers[j + 3], &layers[j].transpose());
                }
            }
        }

        #[test]
        fn one_cell_sweep_equals_teleport(seeds in proptest::collection::vec((0i32..4, 0i32..4, 0i32..3, 0i32..3), 2..6)) {
            let a = random_assembly(&seeds);
            let cf = a.constraint_free_matrices(1.0, 5.0);
            for j in 0..6 {
                for i in 0..a.len() {
                    for k in (0..a.len()).filter(|&k| k != i) {
                        prop_assert_eq!(cf[j].get(i, k) == 1, !a.teleport_blocked(i, k, j, 1));
                    }
                }
            }
        }

        #[test]
        fn larger_clearance_never_frees(seeds in proptest::collection::vec((0i32..4, 0i32..4, 0i32..3, 0i32..3), 2..6), c in 1i32..4) {
            let a = random_assembly(&seeds);
            let small = a.constraint_free_matrices(c as f64, 5.0);
            let large = a.constraint_free_matrices((c + 2) as f64, 5.0);
            for j in 0..6 {
                for i in 0..a.len() {
                    for k in 0..a.len() {
                        prop_assert!(large[j].get(i, k) <= small[j].get(i, k));
                    }
                }
            }
        }
    }
}
