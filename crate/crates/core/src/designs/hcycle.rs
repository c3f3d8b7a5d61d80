use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;

use super::perm::{all_permutations, is_permutation, random_permutation};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Closed alternating row/column cycle through `2n` cells, generated by two
/// permutations `I = (i_1..i_n)` and `J = (j_1..j_n)`:
/// `(i_1,j_1), (i_2,j_1), (i_2,j_2), ..., (i_n,j_n), (i_1,j_n)`.
///
/// Stored in canonical form: the lexicographically least `(I, J)` among the
/// `2n` rotations and reversals that describe the same cell set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HCycle {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl HCycle {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() || rows.len() < 2 {
            return Err(Error::InvalidParameter(
                "an H-cycle needs two permutations of the same order n >= 2".into(),
            ));
        }
        if !is_permutation(&rows) || !is_permutation(&cols) {
            return Err(Error::InvalidParameter("H-cycle generators must be permutations".into()));
        }
        let (rows, cols) = representations(&rows, &cols).into_iter().min().unwrap();
        Ok(HCycle { rows, cols })
    }

    pub fn random(n: usize, rng: &mut Rng) -> Result<Self> {
        let rows = random_permutation(n, rng);
        let cols = random_permutation(n, rng);
        Self::new(rows, cols)
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn row_sequence(&self) -> &[usize] {
        &self.rows
    }

    pub fn col_sequence(&self) -> &[usize] {
        &self.cols
    }

    /// The `2n` cells in cycle order, starting `(i_1, j_1), (i_2, j_1)`.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n)
            .flat_map(|v| [(self.rows[v], self.cols[v]), (self.rows[(v + 1) % n], self.cols[v])])
            .collect()
    }

    pub fn cell_set(&self) -> BTreeSet<(usize, usize)> {
        self.cells().into_iter().collect()
    }
}

/// All `2n` generator pairs describing the same H-cycle.
fn representations(rows: &[usize], cols: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = rows.len();
    // reversed traversal: i_1, i_n, ..., i_2 with columns j_n, ..., j_1
    let rev_rows: Vec<usize> = std::iter::once(rows[0]).chain(rows[1..].iter().rev().copied()).collect();
    let rev_cols: Vec<usize> = cols.iter().rev().copied().collect();
    let mut reps = Vec::with_capacity(2 * n);
    for (r, c) in [(rows.to_vec(), cols.to_vec()), (rev_rows, rev_cols)] {
        for shift in 0..n {
            let mut rr = r.clone();
            let mut cc = c.clone();
            rr.rotate_left(shift);
            cc.rotate_left(shift);
            reps.push((rr, cc));
        }
    }
    reps
}

/// `n! (n-1)! / 2`.
pub fn count_h_cycles(n: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::InvalidParameter("H-cycles need n >= 2".into()));
    }
    let fact = |k: usize| (1..=k).fold(BigUint::one(), |acc, v| acc * BigUint::from(v));
    Ok(fact(n) * fact(n - 1) / BigUint::from(2u32))
}

/// Every distinct H-cycle on `[n]^2`, by canonicalizing all generator pairs (`n <= 5`).
pub fn enumerate_h_cycles(n: usize) -> Result<Vec<HCycle>> {
    if !(2..=5).contains(&n) {
        return Err(Error::TooLarge(format!("H-cycle enumeration supports 2 <= n <= 5, got {n}")));
    }
    let perms = all_permutations(n);
    let mut seen = BTreeSet::new();
    for i in &perms {
        for j in &perms {
            seen.insert(HCycle::new(i.clone(), j.clone())?);
        }
    }
    Ok(seen.into_iter().collect())
}
