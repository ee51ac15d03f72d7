//! Synthetic screw-tower products.
//!
//! A base plate carries `n_layers` stacked plates. Each plate is held by
//! `screws_per_layer` screws: a shaft through the plate that bites one cell
//! into the layer below, capped by a head sitting in a counterbore of the
//! next plate up. A plate cannot move while any of its screws is present,
//! and a screw cannot leave until the plate above it is gone.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Cell, CellBox, VoxelAssembly, VoxelPart};
use crate::model::{Dataset, ModelError, Part, PartCatalog, PartId, RelationMatrices, TaskLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_layers: usize,
    pub screws_per_layer: usize,
    /// Share of plates that get the manual label.
    pub manual_fraction: f64,
    /// Number of plates that get the value label.
    pub priority_count: usize,
    /// Ignore-labeled spacers resting on the top plate.
    pub spacers: usize,
    pub seed: u64,
    pub pitch_mm: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_layers: 3,
            screws_per_layer: 2,
            manual_fraction: 0.0,
            priority_count: 0,
            spacers: 0,
            seed: 0,
            pitch_mm: 10.0,
        }
    }
}

impl SyntheticSpec {
    pub fn tower(n_layers: usize, screws_per_layer: usize, seed: u64) -> Self {
        Self {
            n_layers,
            screws_per_layer,
            seed,
            ..Self::default()
        }
    }

    /// Total number of parts the generator will emit.
    pub fn part_count(&self) -> usize {
        1 + self.n_layers * (1 + self.screws_per_layer) + self.spacers
    }
}

/// Parameters of the constraint-free simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub clearance_mm: f64,
    pub angle_deg: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            clearance_mm: 10.0,
            angle_deg: 5.0,
        }
    }
}

const THICKNESS: i32 = 2;

fn z_bottom(layer: i32) -> i32 {
    // layer -1 is the base plate
    THICKNESS * (layer + 1)
}

fn z_top(layer: i32) -> i32 {
    z_bottom(layer) + THICKNESS - 1
}

/// Screw sites per axis on each of the two lattices.
fn lattice_size(screws: usize) -> i32 {
    let mut m = 1;
    while m * m < 2 * screws as i32 {
        m += 1;
    }
    m
}

fn head_cells(x: i32, y: i32) -> [(i32, i32); 2] {
    [(x, y), (x + 1, y)]
}

/// Through-hole in the block above a screw, leaving a one-cell gap
/// around the head.
fn head_clearance(x: i32, y: i32) -> impl Iterator<Item = (i32, i32)> {
    (x - 1..=x + 2).flat_map(move |hx| (y - 1..=y + 1).map(move |hy| (hx, hy)))
}

/// Builds a screw tower and its catalog. Deterministic in `spec.seed`.
///
/// Block `L` overhangs the block below by one cell on every side and
/// hangs a skirt down around it, so blocks leave only upward and only
/// from the top. Each screw runs through its block, bites one cell into
/// the layer below and has a two-cell head on top. The block above
/// clears the head with a through-hole. Even layers use sites
/// `(1+4a, 1+4b)`, odd layers `(3+4a, 3+4b)`, and a layer never reuses
/// the sites of the layer two below.
///
/// Ids: base plate is 1, then each layer's block followed by its screws,
/// then the spacers.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(VoxelAssembly, PartCatalog), ModelError> {
    assert!(spec.n_layers >= 1, "a tower needs at least one layer");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = lattice_size(spec.screws_per_layer);
    let w = 4 * m + 1;
    let layers = spec.n_layers as i32;

    let mut screw_xy: Vec<Vec<(i32, i32)>> = Vec::new();
    for layer in 0..spec.n_layers {
        let offset = if layer % 2 == 0 { 1 } else { 3 };
        let avoid = layer.checked_sub(2).map(|l| screw_xy[l].clone()).unwrap_or_default();
        let mut pool: Vec<(i32, i32)> = (0..m)
            .flat_map(|a| (0..m).map(move |b| (offset + 4 * a, offset + 4 * b)))
            .filter(|p| !avoid.contains(p))
            .collect();
        pool.shuffle(&mut rng);
        pool.truncate(spec.screws_per_layer);
        pool.sort_unstable();
        screw_xy.push(pool);
    }

    // layer -1 is the base, which has neither overhang nor skirt
    let block = |layer: i32| -> Vec<Cell> {
        let lo = -(layer + 1);
        let hi = w + layer;
        let mut holes: Vec<Cell> = Vec::new();
        if layer >= 0 {
            for &(x, y) in &screw_xy[layer as usize] {
                holes.extend((z_bottom(layer)..=z_top(layer)).map(|z| [x, y, z]));
            }
        }
        if layer + 1 < layers {
            holes.extend(screw_xy[(layer + 1) as usize].iter().map(|&(x, y)| [x, y, z_top(layer)]));
        }
        if layer >= 1 {
            for &(x, y) in &screw_xy[(layer - 1) as usize] {
                for (hx, hy) in head_clearance(x, y) {
                    holes.extend((z_bottom(layer)..=z_top(layer)).map(|z| [hx, hy, z]));
                }
            }
        }
        let (lo, hi) = if layer < 0 { (0, w - 1) } else { (lo, hi) };
        let mut cells: Vec<Cell> = (lo..=hi)
            .flat_map(|x| (lo..=hi).flat_map(move |y| (z_bottom(layer)..=z_top(layer)).map(move |z| [x, y, z])))
            .filter(|c| !holes.contains(c))
            .collect();
        if layer >= 0 {
            for x in lo..=hi {
                for y in lo..=hi {
                    if x == lo || y == lo || x == hi || y == hi {
                        cells.extend((z_bottom(layer - 1)..=z_top(layer - 1)).map(|z| [x, y, z]));
                    }
                }
            }
        }
        cells
    };

    let mut voxels: Vec<Vec<Cell>> = vec![block(-1)];
    let mut names: Vec<String> = vec!["base_plate_base".to_string()];
    let mut block_ids = Vec::new();
    for layer in 0..layers {
        block_ids.push(voxels.len());
        voxels.push(block(layer));
        names.push(String::new());
        for (s, &(x, y)) in screw_xy[layer as usize].iter().enumerate() {
            let mut cells: Vec<Cell> = (z_bottom(layer) - 1..=z_top(layer)).map(|z| [x, y, z]).collect();
            cells.extend(head_cells(x, y).iter().map(|&(hx, hy)| [hx, hy, z_top(layer) + 1]));
            voxels.push(cells);
            names.push(format!("screw{}x{}_screw", layer + 1, s + 1));
        }
    }
    let (lo, hi) = (-layers, w - 1 + layers);
    let top = z_top(layers - 1) + 1;
    let corners = [(lo, lo), (hi, lo), (lo, hi), (hi, hi)];
    for s in 0..spec.spacers {
        let (x, y) = corners[s % 4];
        voxels.push(vec![[x, y, top + (s / 4) as i32]]);
        names.push(format!("spacer{}_ignore", s + 1));
    }

    let mut order: Vec<usize> = block_ids.clone();
    order.shuffle(&mut rng);
    let manual_count = ((spec.manual_fraction * spec.n_layers as f64).round() as usize).min(spec.n_layers);
    let manual: Vec<usize> = order[..manual_count].to_vec();
    order.shuffle(&mut rng);
    let valuable: Vec<usize> = order[..spec.priority_count.min(spec.n_layers)].to_vec();
    for (layer, &idx) in block_ids.iter().enumerate() {
        let task = if manual.contains(&idx) {
            "manual"
        } else if layer % 2 == 0 {
            "plate"
        } else {
            "graspable"
        };
        let value = if valuable.contains(&idx) { "_value" } else { "" };
        names[idx] = format!("block{}_{task}{value}", layer + 1);
    }

    let parts: Vec<VoxelPart> = voxels
        .into_iter()
        .enumerate()
        .map(|(i, cells)| VoxelPart::new(PartId(i as u32 + 1), cells).expect("generated parts are non-empty"))
        .collect();
    let height = top + spec.spacers.div_ceil(4) as i32;
    let span = hi - lo + 1;
    let workspace = CellBox {
        min: [lo - span, lo - span, 0],
        max: [hi + span, hi + span, 2 * height + 1],
    };
    let assembly =
        VoxelAssembly::new(spec.pitch_mm, parts, workspace).expect("generated tower is interference-free");

    let catalog_parts = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut part = Part::from_name(i as u32 + 1, name, assembly.com_mm(i))?;
            part.size = Some(assembly.parts()[i].volume() as f64);
            part.eef = match part.task {
                Some(TaskLabel::Screw) => Some("E4".to_string()),
                _ if part.base || part.ignore => None,
                _ => Some("E2".to_string()),
            };
            Ok(part)
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok((assembly, PartCatalog::new(catalog_parts)?))
}

/// Runs the geometric simulation over the non-ignored parts and packages
/// everything as a validated dataset.
pub fn build_dataset(
    assembly: &VoxelAssembly,
    catalog: PartCatalog,
    params: SimParams,
) -> Result<Dataset, ModelError> {
    let active = catalog.active_ids();
    let sub = assembly.subset(&active);
    let matrices = RelationMatrices::from_layers(
        sub.interference_free_matrices(),
        sub.constraint_free_matrices(params.clearance_mm, params.angle_deg),
        sub.contact_matrix(),
    )?;
    let motions = sub.synth_motion_table();
    Dataset::new(catalog, active, matrices, motions)
}

/// [`generate_synthetic`] followed by [`build_dataset`].
pub fn synthetic_dataset(spec: &SyntheticSpec, params: SimParams) -> Result<Dataset, ModelError> {
    let (assembly, catalog) = generate_synthetic(spec)?;
    build_dataset(&assembly, catalog, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{ConstraintContext, FeasibilityMode};

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn single_plate_tower_is_free_either_way() {
        let ds = synthetic_dataset(&SyntheticSpec::tower(1, 0, 1), SimParams::default()).unwrap();
        assert_eq!(ds.active_len(), 2);
        let ctx = ConstraintContext::new(&ds);
        assert!(ctx.order_feasible_idx(&[0, 1], FeasibilityMode::AsWritten));
        assert!(ctx.order_feasible_idx(&[1, 0], FeasibilityMode::AsWritten));
    }

    #[test]
    fn blocks_cannot_leave_before_their_screws() {
        let spec = SyntheticSpec::tower(2, 1, 7);
        let ds = synthetic_dataset(&spec, SimParams::default()).unwrap();
        assert_eq!(ds.active_len(), 5);
        let ctx = ConstraintContext::new(&ds);
        // ids: 1 base, 2 block1, 3 screw1, 4 block2, 5 screw2
        let pos = |perm: &[usize], part: usize| perm.iter().position(|&p| p == part).unwrap();
        let mut available = 0;
        for perm in permutations(5) {
            let flags = ctx.check_idx(&perm, FeasibilityMode::AsWritten);
            // higher storage position = removed earlier
            if pos(&perm, 1) > pos(&perm, 2) || pos(&perm, 3) > pos(&perm, 4) {
                assert!(!flags.motion_feasible, "{perm:?} removes a block before its screw");
                assert!(!ctx.check_idx(&perm, FeasibilityMode::Strict).available);
            }
            available += flags.available as usize;
        }
        assert!(ctx.check_idx(&[0, 1, 2, 3, 4], FeasibilityMode::Strict).available);
        assert!(available >= 1);
    }

    #[test]
    fn bottom_block_before_top_block_is_infeasible() {
        let ds = synthetic_dataset(&SyntheticSpec::tower(2, 0, 0), SimParams::default()).unwrap();
        let ctx = ConstraintContext::new(&ds);
        for mode in [FeasibilityMode::AsWritten, FeasibilityMode::Strict] {
            assert!(!ctx.motion_feasible_idx(&[0, 2, 1], mode));
            assert!(ctx.motion_feasible_idx(&[0, 1, 2], mode));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec {
            manual_fraction: 0.5,
            priority_count: 1,
            spacers: 2,
            ..SyntheticSpec::tower(4, 3, 11)
        };
        let (a1, c1) = generate_synthetic(&spec).unwrap();
        let (a2, c2) = generate_synthetic(&spec).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(c1, c2);
        assert_eq!(c1.len(), spec.part_count());
        assert_eq!(c1.active_ids().len(), spec.part_count() - 2);
        assert_eq!(c1.parts().iter().filter(|p| p.is_manual()).count(), 2);
        assert_eq!(c1.parts().iter().filter(|p| p.priority).count(), 1);
        assert!(c1.get(PartId(1)).unwrap().base);
    }

    #[test]
    fn contact_graph_of_tower_is_connected_and_constrained() {
        let spec = SyntheticSpec::tower(3, 2, 3);
        let ds = synthetic_dataset(&spec, SimParams::default()).unwrap();
        assert_eq!(ds.active_len(), 10);
        let ct = &ds.matrices().x_ct;
        let cs = &ds.matrices().x_cs;
        // graph search oracle
        let n = ds.active_len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for k in 0..n {
                if ct.get(i, k) == 1 && !seen[k] {
                    seen[k] = true;
                    stack.push(k);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
        for i in 0..n {
            for k in 0..n {
                if ct.get(i, k) == 1 {
                    assert!(cs.get(i, k) >= 1);
                }
            }
        }
    }

    #[test]
    fn bottom_block_has_no_clear_motion_under_the_stack() {
        let ds = synthetic_dataset(&SyntheticSpec::tower(3, 0, 0), SimParams::default()).unwrap();
        let plate = ds.motions().motions_of(PartId(2));
        assert!(plate.iter().all(|m| m.row.contains(&0)));
        let top = ds.motions().motions_of(PartId(4));
        assert!(top.iter().any(|m| m.kind == "+z" && m.row.iter().all(|&v| v == 1)));
    }
}
