//! Permutation operators. Every function maps permutations to
//! permutations over the same elements.

use rand::Rng;

/// Order crossover with the window `[start, end)` copied from `p1`; the
/// remaining slots are filled left to right with the missing elements in
/// `p2` order.
pub fn ox1_with_window(p1: &[usize], p2: &[usize], start: usize, end: usize) -> Vec<usize> {
    let n = p1.len();
    debug_assert!(start <= end && end <= n && p2.len() == n);
    let mut taken = vec![false; n];
    for &g in &p1[start..end] {
        taken[g] = true;
    }
    let mut fill = p2.iter().copied().filter(|&g| !taken[g]);
    (0..n)
        .map(|i| {
            if (start..end).contains(&i) {
                p1[i]
            } else {
                fill.next().expect("fill covers the remaining slots")
            }
        })
        .collect()
}

/// Random window `[a, b)` with `a < b` when `n > 0`.
fn window<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    (a.min(b), a.max(b) + 1)
}

/// OX1 producing two children from one random window.
pub fn crossover<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let (start, end) = window(a.len(), rng);
    (ox1_with_window(a, b, start, end), ox1_with_window(b, a, start, end))
}

pub fn swap_positions(s: &mut [usize], i: usize, j: usize) {
    s.swap(i, j);
}

/// Swaps two uniformly random positions.
pub fn mutate<R: Rng + ?Sized>(s: &mut [usize], rng: &mut R) {
    if s.len() < 2 {
        return;
    }
    let i = rng.gen_range(0..s.len());
    let j = rng.gen_range(0..s.len());
    swap_positions(s, i, j);
}

/// Moves the window `[start, end)` so that it begins at `gap` in the
/// sequence that remains after excision.
pub fn move_window(s: &[usize], start: usize, end: usize, gap: usize) -> Vec<usize> {
    let piece = &s[start..end];
    let mut rest: Vec<usize> = s[..start].iter().chain(&s[end..]).copied().collect();
    debug_assert!(gap <= rest.len());
    rest.splice(gap..gap, piece.iter().copied());
    rest
}

pub fn cut_and_paste<R: Rng + ?Sized>(s: &mut Vec<usize>, rng: &mut R) {
    if s.len() < 2 {
        return;
    }
    let (start, end) = window(s.len(), rng);
    let gap = rng.gen_range(0..=s.len() - (end - start));
    *s = move_window(s, start, end, gap);
}

/// Splits at `at` and swaps the two segments.
pub fn rotate_at(s: &mut [usize], at: usize) {
    s.rotate_left(at);
}

pub fn break_and_join<R: Rng + ?Sized>(s: &mut [usize], rng: &mut R) {
    let at = rng.gen_range(0..=s.len());
    rotate_at(s, at);
}
