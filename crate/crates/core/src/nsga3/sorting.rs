/// `a` dominates `b` when it is no worse everywhere and differs somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

/// Fast non-dominated sort. Returns fronts of indices into `points`, best
/// first, each front in ascending index order.
pub fn non_dominated_sort<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for p in 0..n {
        for q in p + 1..n {
            let (a, b) = (points[p].as_ref(), points[q].as_ref());
            if dominates(a, b) {
                dominated_by[p].push(q);
                count[q] += 1;
            } else if dominates(b, a) {
                dominated_by[q].push(p);
                count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by[p] {
                count[q] -= 1;
                if count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Front index of every point.
pub fn ranks(fronts: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut rank = vec![0; n];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// NSGA-II crowding distance of each member of `front`, in front order.
pub fn crowding_distance<P: AsRef<[f64]>>(points: &[P], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let dims = points[front[0]].as_ref().len();
    for d in 0..dims {
        let value = |slot: usize| points[front[slot]].as_ref()[d];
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let (lo, hi) = (value(order[0]), value(order[m - 1]));
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..m - 1 {
                dist[order[w]] += (value(order[w + 1]) - value(order[w - 1])) / (hi - lo);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_vectors_form_one_front() {
        let pts = vec![[0.3; 4]; 5];
        assert_eq!(non_dominated_sort(&pts), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn chain_gives_three_fronts() {
        let pts = [[1.0; 4], [0.0; 4], [0.5; 4]];
        assert_eq!(non_dominated_sort(&pts), vec![vec![1], vec![2], vec![0]]);
    }

    #[test]
    fn trade_offs_share_a_front() {
        let pts = [[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        assert_eq!(non_dominated_sort(&pts), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn crowding_marks_extremes_infinite() {
        let pts = [[0.0, 1.0], [0.5, 0.5], [1.0, 0.0], [0.25, 0.75]];
        let d = crowding_distance(&pts, &[0, 1, 2, 3]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 1.5).abs() < 1e-12);
        assert!((d[3] - 1.0).abs() < 1e-12);
    }
}
