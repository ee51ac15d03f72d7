//! Brute-force reference evaluator and shared fixtures.
//!
//! Everything here is computed straight from the raw matrices, catalog and
//! motion table by looping over 1-based storage positions. It shares no
//! code with the engine beyond the data types.

#![allow(dead_code)]

use robodsp::geomsim::{synthetic_dataset, SimParams, SyntheticSpec};
use robodsp::model::{Dataset, PartId, TaskLabel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub order: bool,
    pub motion: bool,
    pub stable: bool,
    pub available: bool,
    pub f: [f64; 4],
}

/// Reference evaluation of `seq` (storage order, position 1 first).
pub fn oracle(ds: &Dataset, seq: &[PartId], strict: bool) -> OracleResult {
    let n = seq.len();
    let m = ds.matrices();
    let ix = |p: usize| ds.index_of(seq[p - 1]).unwrap();
    let part = |p: usize| ds.catalog().get(seq[p - 1]).unwrap().clone();

    let mut order = true;
    for k in 2..=n {
        if strict {
            order &= (0..6).any(|j| (1..k).all(|i| m.x_if[j].get(ix(i), ix(k)) == 1));
        } else {
            order &= (1..k).all(|i| (0..6).map(|j| m.x_if[j].get(ix(i), ix(k)) as u32).sum::<u32>() > 0);
        }
    }

    let mut motion = true;
    for k in 2..=n {
        let pk = part(k);
        if pk.task == Some(TaskLabel::Manual) {
            continue;
        }
        let rows: Vec<Vec<u8>> = ds.motions().motions_of(pk.id).iter().map(|mo| mo.row.clone()).collect();
        let ok = if strict {
            rows.iter().any(|r| (1..k).all(|i| r[ix(i)] == 1))
        } else {
            (1..k).all(|i| rows.iter().map(|r| r[ix(i)] as u32).sum::<u32>() > 0)
        };
        motion &= ok;
    }

    let mut stable = true;
    for k in 2..=n {
        stable &= (1..k).map(|i| m.x_ct.get(ix(i), ix(k)) as u32).sum::<u32>() != 0;
    }

    let available = order && motion && stable;
    if !available {
        return OracleResult {
            order,
            motion,
            stable,
            available,
            f: [1.0; 4],
        };
    }

    // constraint degree rebuilt from the free-direction layers
    let cs = |a: usize, b: usize| -> f64 {
        if a == b {
            return 0.0;
        }
        12.0 - (0..12).map(|j| m.x_cf[j].get(a, b) as f64).sum::<f64>()
    };
    let mut h = 0.0f64;
    for k in 2..=n {
        let s: f64 = (1..k).map(|i| cs(ix(i), ix(k))).sum();
        h = h.max(s);
    }
    let f_d = if n > 1 { h / (12.0 * (n as f64 - 1.0)) } else { 0.0 };

    let dist = |a: [f64; 3], b: [f64; 3]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    let active: Vec<_> = ds.part_order().iter().map(|&id| ds.catalog().get(id).unwrap().clone()).collect();
    let mut d_max = 0.0f64;
    for a in &active {
        for b in &active {
            d_max = d_max.max(dist(a.com, b.com));
        }
    }
    let mut changes = 0.0;
    let mut travel = 0.0;
    for k in 2..=n {
        if part(k).task != part(k - 1).task {
            changes += 1.0;
        }
        travel += dist(part(k).com, part(k - 1).com);
    }
    let f_e = if n > 1 {
        let d_term = if d_max > 0.0 { travel / (n as f64 * d_max) } else { 0.0 };
        (changes / (n as f64 - 1.0) + d_term) / 2.0
    } else {
        0.0
    };

    let npp = (1..=n).filter(|&p| part(p).priority).count();
    let f_p = if npp == 0 {
        0.0
    } else {
        let r: usize = (1..=n).filter(|&p| part(p).priority).sum();
        let r_max: usize = (n - npp + 1..=n).sum();
        1.0 - r as f64 / r_max as f64
    };

    let manual: Vec<usize> = (1..=n).filter(|&p| part(p).task == Some(TaskLabel::Manual)).collect();
    let f_a = if manual.len() < 2 {
        0.0
    } else {
        (manual[manual.len() - 1] - manual[0]) as f64 / (n as f64 - 1.0)
    };

    OracleResult {
        order,
        motion,
        stable,
        available,
        f: [f_d, f_e, f_p, f_a],
    }
}

/// Calls `visit` on every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation<T: Clone>(items: &[T], mut visit: impl FnMut(&[T])) {
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

pub fn tower(spec: SyntheticSpec) -> Dataset {
    synthetic_dataset(&spec, SimParams::default()).expect("tower builds")
}

/// 5-part tower: base, two blocks, one screw each.
pub fn five_part(seed: u64) -> Dataset {
    tower(SyntheticSpec::tower(2, 1, seed))
}

/// 7-part tower with a value block and manual parts so every objective is live.
pub fn seven_part(seed: u64) -> Dataset {
    let mut spec = SyntheticSpec::tower(2, 2, seed);
    spec.priority_count = 1;
    spec.manual_fraction = 1.0;
    tower(spec)
}

/// The 10-part screw tower: base, three blocks, two screws per block.
pub fn ten_part(seed: u64) -> Dataset {
    tower(SyntheticSpec::tower(3, 2, seed))
}

/// 10-part tower with value and manual labels.
pub fn ten_part_labeled(seed: u64) -> Dataset {
    let mut spec = SyntheticSpec::tower(3, 2, seed);
    spec.priority_count = 2;
    spec.manual_fraction = 0.67;
    tower(spec)
}

/// Twenty small towers (at most 7 active parts) with varied labels.
pub fn small_towers() -> Vec<(String, Dataset)> {
    let shapes = [(1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (2, 1), (2, 2)];
    (0..20u64)
        .map(|s| {
            let (layers, screws) = shapes[s as usize % shapes.len()];
            let mut spec = SyntheticSpec::tower(layers, screws, s);
            spec.priority_count = (s % 3) as usize;
            spec.manual_fraction = [0.0, 0.5, 1.0][(s / 3 % 3) as usize];
            spec.spacers = (s % 2) as usize;
            (format!("tower({layers},{screws}) seed {s}"), tower(spec))
        })
        .collect()
}
