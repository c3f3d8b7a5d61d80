//! Small permutation helpers. Permutations are 0-based slices `p` with `i -> p[i]`.

use rand::seq::SliceRandom;

use crate::rng::Rng;

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&v| v < p.len() && !std::mem::replace(&mut seen[v], true))
}

/// Advances `p` to the next permutation in lexicographic order; `false` after the last.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

pub fn random_permutation(n: usize, rng: &mut Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Lengths of the cycles of `p`.
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut lens = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        lens.push(len);
    }
    lens
}

pub fn is_single_cycle(p: &[usize]) -> bool {
    cycle_type(p).len() == 1
}

/// A uniformly random permutation consisting of one cycle through all of `0..n`.
pub fn random_cyclic(n: usize, rng: &mut Rng) -> Vec<usize> {
    let order = random_permutation(n, rng);
    let mut p = vec![0; n];
    for k in 0..n {
        p[order[k]] = order[(k + 1) % n];
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all() {
        assert_eq!(all_permutations(4).len(), 24);
        assert_eq!(all_permutations(1), vec![vec![0]]);
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_type(&[1, 0, 2]), vec![2, 1]);
        assert!(is_single_cycle(&[1, 2, 0]));
        assert!(!is_single_cycle(&[0, 1]));
        let mut rng = crate::rng::seeded(3);
        for n in 1..8 {
            assert!(is_single_cycle(&random_cyclic(n, &mut rng)));
        }
        assert_eq!(inverse(&[2, 0, 1]), vec![1, 2, 0]);
    }
}
