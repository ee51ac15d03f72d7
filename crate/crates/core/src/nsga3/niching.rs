//! Environmental selection: reference-line niching and crowding distance.

use rand::seq::SliceRandom;
use rand::Rng;

use super::reference::ReferencePointSet;
use super::sorting::{crowding_distance, non_dominated_sort};

/// Survivors of one environmental selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Indices into the pool, in admission order.
    pub survivors: Vec<usize>,
    /// Front index of each survivor.
    pub rank: Vec<usize>,
    /// Secondary tournament key of each survivor, smaller is better.
    pub key: Vec<f64>,
}

fn perpendicular_distance(point: &[f64], direction: &[f64]) -> f64 {
    let norm2: f64 = direction.iter().map(|w| w * w).sum();
    let t = point.iter().zip(direction).map(|(f, w)| f * w).sum::<f64>() / norm2;
    point
        .iter()
        .zip(direction)
        .map(|(f, w)| (f - t * w).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Nearest reference line and its distance for a point; ties go to the
/// lower reference index.
pub fn associate(point: &[f64], refs: &ReferencePointSet) -> (usize, f64) {
    refs.points
        .iter()
        .enumerate()
        .map(|(j, w)| (j, perpendicular_distance(point, w)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Translates by the ideal point and scales by the nadir-ideal span of the
/// given members; constant objectives map to 0.
pub fn normalize<P: AsRef<[f64]>>(points: &[P], members: &[usize]) -> Vec<Vec<f64>> {
    let dims = points.first().map_or(0, |p| p.as_ref().len());
    let lo: Vec<f64> = (0..dims)
        .map(|d| members.iter().map(|&i| points[i].as_ref()[d]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..dims)
        .map(|d| members.iter().map(|&i| points[i].as_ref()[d]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    points
        .iter()
        .map(|p| {
            (0..dims)
                .map(|d| {
                    let span = hi[d] - lo[d];
                    if span > 0.0 {
                        (p.as_ref()[d] - lo[d]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Reference-point survival. Whole fronts are admitted while they fit; the
/// splitting front is thinned by filling the least-crowded niches first.
pub fn niche_select<P: AsRef<[f64]>, R: Rng + ?Sized>(
    points: &[P],
    refs: &ReferencePointSet,
    n_select: usize,
    normalized: bool,
    rng: &mut R,
) -> Selection {
    let fronts = non_dominated_sort(points);
    let mut admitted: Vec<usize> = Vec::new();
    let mut split: Option<usize> = None;
    for (r, front) in fronts.iter().enumerate() {
        if admitted.len() + front.len() <= n_select {
            admitted.extend(front);
        } else {
            split = Some(r);
            break;
        }
        if admitted.len() == n_select {
            break;
        }
    }
    let considered: Vec<usize> = admitted
        .iter()
        .copied()
        .chain(split.into_iter().flat_map(|r| fronts[r].iter().copied()))
        .collect();
    let space: Vec<Vec<f64>> = if normalized {
        normalize(points, &considered)
    } else {
        points.iter().map(|p| p.as_ref().to_vec()).collect()
    };
    let mut niche = vec![0usize; points.len()];
    let mut distance = vec![0.0; points.len()];
    for &i in &considered {
        (niche[i], distance[i]) = associate(&space[i], refs);
    }

    let mut survivors = admitted.clone();
    if let Some(r) = split {
        let mut count = vec![0usize; refs.len()];
        for &i in &admitted {
            count[niche[i]] += 1;
        }
        let mut pending: Vec<usize> = fronts[r].clone();
        let mut open = vec![true; refs.len()];
        while survivors.len() < n_select {
            let least = (0..refs.len()).filter(|&j| open[j]).map(|j| count[j]).min().expect("an open niche");
            let ties: Vec<usize> = (0..refs.len()).filter(|&j| open[j] && count[j] == least).collect();
            let j = *ties.choose(rng).expect("non-empty");
            let members: Vec<usize> = pending.iter().copied().filter(|&i| niche[i] == j).collect();
            if members.is_empty() {
                open[j] = false;
                continue;
            }
            let chosen = if count[j] == 0 {
                members
                    .iter()
                    .copied()
                    .fold(members[0], |best, i| if distance[i] < distance[best] { i } else { best })
            } else {
                *members.choose(rng).expect("non-empty")
            };
            pending.retain(|&i| i != chosen);
            survivors.push(chosen);
            count[j] += 1;
        }
    }
    let rank_of = super::sorting::ranks(&fronts, points.len());
    Selection {
        rank: survivors.iter().map(|&i| rank_of[i]).collect(),
        key: survivors.iter().map(|&i| distance[i]).collect(),
        survivors,
    }
}

/// NSGA-II survival: whole fronts, then the most isolated members of the
/// splitting front. Keys are negated crowding distances.
pub fn crowding_select<P: AsRef<[f64]>>(points: &[P], n_select: usize) -> Selection {
    let fronts = non_dominated_sort(points);
    let mut sel = Selection {
        survivors: Vec::new(),
        rank: Vec::new(),
        key: Vec::new(),
    };
    for (r, front) in fronts.iter().enumerate() {
        let room = n_select - sel.survivors.len();
        if room == 0 {
            break;
        }
        let crowd = crowding_distance(points, front);
        let mut slots: Vec<usize> = (0..front.len()).collect();
        if front.len() > room {
            slots.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(a.cmp(&b)));
            slots.truncate(room);
        }
        for s in slots {
            sel.survivors.push(front[s]);
            sel.rank.push(r);
            sel.key.push(-crowd[s]);
        }
    }
    sel
}
