mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robodsp::constraints::{ConstraintContext, FeasibilityMode};
use robodsp::model::{Dataset, Motion, MotionTable, Part, PartCatalog, PartId, RelationMatrices, SquareMatrix};
use robodsp::objectives::{Evaluator, ObjectiveVector};

use common::oracle;

const TASKS: [&str; 6] = ["screw", "bolt", "nut", "plate", "graspable", "manual"];

/// Layers obeying the negative-direction transpose rule; rotation layers symmetric.
fn random_layers(rng: &mut ChaCha8Rng, n: usize, count: usize, density: f64) -> Vec<SquareMatrix<u8>> {
    let mut layers: Vec<SquareMatrix<u8>> = (0..count).map(|_| SquareMatrix::new(n)).collect();
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            for j in 0..3 {
                let v = rng.gen_bool(density) as u8;
                layers[j].set(i, k, v);
                layers[j + 3].set(k, i, v);
            }
            if i < k {
                for layer in layers.iter_mut().skip(6) {
                    let v = rng.gen_bool(density) as u8;
                    layer.set(i, k, v);
                    layer.set(k, i, v);
                }
            }
        }
    }
    layers
}

struct Twins(usize, usize);

fn make_twins(layers: &mut [SquareMatrix<u8>], t: &Twins) {
    let n = layers[0].size();
    let (a, b) = (t.0, t.1);
    for j in 0..layers.len() {
        for k in 0..n {
            if k != a && k != b {
                let (r, c) = (layers[j].get(a, k), layers[j].get(k, a));
                layers[j].set(b, k, r);
                layers[j].set(k, b, c);
            }
        }
    }
    for j in 0..layers.len() {
        let v = layers[j].get(a, b);
        layers[j].set(b, a, v);
    }
    // re-impose the transpose rule on the pair after symmetrizing
    for j in 0..3.min(layers.len()) {
        if layers.len() > j + 3 {
            let v = layers[j].get(a, b);
            layers[j + 3].set(a, b, v);
            layers[j + 3].set(b, a, v);
        }
    }
}

fn random_dataset(seed: u64, n: usize, twins: Option<Twins>) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x_if = random_layers(&mut rng, n, 6, 0.7);
    let mut x_cf = random_layers(&mut rng, n, 12, 0.6);
    let mut x_ct = SquareMatrix::new(n);
    for i in 0..n {
        for k in i + 1..n {
            let v = rng.gen_bool(0.6) as u8;
            x_ct.set(i, k, v);
            x_ct.set(k, i, v);
        }
    }
    let mut names: Vec<String> = (0..n)
        .map(|i| {
            let task = TASKS[rng.gen_range(0..TASKS.len())];
            let value = if rng.gen_bool(0.3) { "_value" } else { "" };
            format!("p{i}_{task}{value}")
        })
        .collect();
    let mut coms: Vec<[f64; 3]> = (0..n).map(|_| std::array::from_fn(|_| rng.gen_range(-50.0..50.0))).collect();
    let mut rows: Vec<Vec<Vec<u8>>> = (0..n)
        .map(|_| {
            let count = rng.gen_range(0..4);
            (0..count).map(|_| (0..n).map(|_| rng.gen_bool(0.7) as u8).collect()).collect()
        })
        .collect();
    if let Some(t) = &twins {
        make_twins(&mut x_if, t);
        make_twins(&mut x_cf, t);
        make_twins(std::slice::from_mut(&mut x_ct), t);
        let task = ["screw", "plate", "graspable"][rng.gen_range(0..3)];
        names[t.0] = format!("p{}_{task}", t.0);
        names[t.1] = format!("p{}_{task}", t.1);
        coms[t.1] = coms[t.0];
        for r in rows.iter_mut().flatten() {
            r[t.1] = r[t.0];
        }
        rows[t.1] = rows[t.0].clone();
    }
    for i in 0..n {
        for k in 0..n {
            if x_ct.get(i, k) == 1 && (0..12).all(|j| x_cf[j].get(i, k) == 1) {
                x_cf[0].set(i, k, 0);
                x_cf[3].set(k, i, 0);
                x_cf[0].set(k, i, 0);
                x_cf[3].set(i, k, 0);
            }
        }
    }
    let parts: Vec<Part> = names
        .iter()
        .enumerate()
        .map(|(i, name)| Part::from_name(i as u32 + 1, name, coms[i]).unwrap())
        .collect();
    let mut motions = MotionTable::default();
    for (i, list) in rows.into_iter().enumerate() {
        let list: Vec<Motion> = list
            .into_iter()
            .enumerate()
            .map(|(m, row)| Motion {
                id: m as u32,
                kind: format!("m{m}"),
                row,
            })
            .collect();
        motions.motions.insert(PartId(i as u32 + 1), list);
    }
    Dataset::new(
        PartCatalog::new(parts).unwrap(),
        (1..=n as u32).map(PartId).collect(),
        RelationMatrices::from_layers(x_if, x_cf, x_ct).unwrap(),
        motions,
    )
    .unwrap()
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

fn ids(ds: &Dataset, idx: &[usize]) -> Vec<PartId> {
    idx.iter().map(|&i| ds.part_order()[i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_matches_oracle_on_random_matrices(seed in any::<u64>(), n in 1usize..8, perm in any::<u64>()) {
        let ds = random_dataset(seed, n, None);
        let idx = shuffled(n, perm);
        let ctx = ConstraintContext::new(&ds);
        for mode in [FeasibilityMode::AsWritten, FeasibilityMode::Strict] {
            let flags = ctx.check_idx(&idx, mode);
            let e = Evaluator::new(&ds, mode).evaluate_idx(&idx);
            let o = oracle(&ds, &ids(&ds, &idx), mode == FeasibilityMode::Strict);
            prop_assert_eq!((flags.order_feasible, flags.motion_feasible, flags.stable, flags.available),
                            (o.order, o.motion, o.stable, o.available));
            let f = e.objectives.as_array();
            for d in 0..4 {
                prop_assert!((f[d] - o.f[d]).abs() <= 1e-12, "objective {} {} vs {}", d, f[d], o.f[d]);
            }
        }
    }

    #[test]
    fn strict_implies_as_written(seed in any::<u64>(), n in 2usize..8, perm in any::<u64>()) {
        let ds = random_dataset(seed, n, None);
        let idx = shuffled(n, perm);
        let ctx = ConstraintContext::new(&ds);
        let strict = ctx.check_idx(&idx, FeasibilityMode::Strict);
        let loose = ctx.check_idx(&idx, FeasibilityMode::AsWritten);
        prop_assert!(!strict.order_feasible || loose.order_feasible);
        prop_assert!(!strict.motion_feasible || loose.motion_feasible);
        prop_assert!(!strict.available || loose.available);
    }

    #[test]
    fn available_iff_all_three_and_penalty_otherwise(seed in any::<u64>(), n in 1usize..8, perm in any::<u64>()) {
        let ds = random_dataset(seed, n, None);
        let idx = shuffled(n, perm);
        let ctx = ConstraintContext::new(&ds);
        for mode in [FeasibilityMode::AsWritten, FeasibilityMode::Strict] {
            let flags = ctx.check_idx(&idx, mode);
            prop_assert_eq!(flags.available, flags.order_feasible && flags.motion_feasible && flags.stable);
            prop_assert_eq!(flags.available, flags.first_violation.is_none());
            let e = Evaluator::new(&ds, mode).evaluate_idx(&idx);
            if e.available {
                prop_assert!(e.objectives.as_array().iter().all(|v| (0.0..=1.0).contains(v)));
            } else {
                prop_assert_eq!(e.objectives, ObjectiveVector::PENALTY);
            }
        }
    }

    #[test]
    fn adjacent_swap_only_touches_two_terms(seed in any::<u64>(), n in 2usize..8, perm in any::<u64>(), at in any::<prop::sample::Index>()) {
        let ds = random_dataset(seed, n, None);
        let mut idx = shuffled(n, perm);
        let ctx = ConstraintContext::new(&ds);
        let k = at.index(n - 1);
        for mode in [FeasibilityMode::AsWritten, FeasibilityMode::Strict] {
            let mut terms = ctx.terms(&idx, mode);
            idx.swap(k, k + 1);
            ctx.update_after_adjacent_swap(&mut terms, &idx, k, mode);
            prop_assert_eq!(&terms, &ctx.terms(&idx, mode));
            idx.swap(k, k + 1);
        }
    }

    #[test]
    fn swapping_twin_parts_keeps_every_objective(seed in any::<u64>(), n in 3usize..8, perm in any::<u64>()) {
        let ds = random_dataset(seed, n, Some(Twins(0, 1)));
        let idx = shuffled(n, perm);
        let a = idx.iter().position(|&i| i == 0).unwrap();
        let b = idx.iter().position(|&i| i == 1).unwrap();
        let mut swapped = idx.clone();
        swapped.swap(a, b);
        let eval = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        let x = eval.objectives_idx(&idx).as_array();
        let y = eval.objectives_idx(&swapped).as_array();
        for d in 0..4 {
            prop_assert!((x[d] - y[d]).abs() <= 1e-12);
        }
        prop_assert_eq!(eval.evaluate_idx(&idx).available, eval.evaluate_idx(&swapped).available);
    }

    #[test]
    fn prioritization_depends_only_on_positions(seed in any::<u64>(), n in 2usize..8, perm in any::<u64>(), shift in 1usize..7) {
        // relabelling which slots hold which ids leaves f_p a function of priority positions alone
        let ds = random_dataset(seed, n, None);
        let idx = shuffled(n, perm);
        let eval = Evaluator::new(&ds, FeasibilityMode::AsWritten);
        let priority: Vec<bool> = idx.iter().map(|&i| ds.part_at(i).priority).collect();
        let mut rotated = idx.clone();
        rotated.rotate_left(shift % n);
        let rotated_priority: Vec<bool> = rotated.iter().map(|&i| ds.part_at(i).priority).collect();
        if priority == rotated_priority {
            prop_assert_eq!(eval.prioritization_idx(&idx), eval.prioritization_idx(&rotated));
        }
        let positions: usize = priority.iter().enumerate().filter(|(_, &p)| p).map(|(k, _)| k + 1).sum();
        let npp = priority.iter().filter(|&&p| p).count();
        let expected = if npp == 0 { 0.0 } else { 1.0 - positions as f64 / (n - npp + 1..=n).sum::<usize>() as f64 };
        prop_assert!((eval.prioritization_idx(&idx) - expected).abs() <= 1e-12);
    }
}

#[test]
fn random_dataset_generator_yields_valid_twins() {
    for seed in 0..50 {
        let ds = random_dataset(seed, 5, Some(Twins(0, 1)));
        assert_eq!(ds.active_len(), 5);
        assert_eq!(ds.part_at(0).task, ds.part_at(1).task);
    }
}
