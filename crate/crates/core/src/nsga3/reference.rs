use serde::{Deserialize, Serialize};

/// Structured reference points on the unit simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePointSet {
    pub divisions: usize,
    pub points: Vec<Vec<f64>>,
}

impl ReferencePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Das-Dennis lattice: every `m`-vector of multiples of `1/p` summing to 1,
/// in lexicographic order of the integer compositions.
pub fn das_dennis_points(m: usize, p: usize) -> ReferencePointSet {
    fn compose(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            compose(left - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    if m > 0 {
        compose(p, m, &mut Vec::new(), &mut raw);
    }
    let points = raw
        .into_iter()
        .map(|c| c.into_iter().map(|k| k as f64 / p as f64).collect())
        .collect();
    ReferencePointSet { divisions: p, points }
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
