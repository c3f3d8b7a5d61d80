use rand::seq::SliceRandom;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Latin square over the symbols `0..t` (printed 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    grid: Vec<Vec<usize>>,
}

impl LatinSquare {
    pub fn new(grid: Vec<Vec<usize>>) -> Result<Self> {
        let square = LatinSquare { grid };
        square.validate()?;
        Ok(square)
    }

    /// `L(i, j) = i + j mod t`.
    pub fn cyclic(t: usize) -> Self {
        LatinSquare {
            grid: (0..t).map(|i| (0..t).map(|j| (i + j) % t).collect()).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.grid.len()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.grid[i][j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.grid
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.grid.len();
        if t == 0 {
            return Err(Error::NotLatin("empty grid".into()));
        }
        for (i, row) in self.grid.iter().enumerate() {
            if row.len() != t {
                return Err(Error::NotLatin(format!("row {} has length {}", i + 1, row.len())));
            }
            if let Some(&s) = row.iter().find(|&&s| s >= t) {
                return Err(Error::NotLatin(format!("symbol {} out of range", s + 1)));
            }
        }
        for i in 0..t {
            let mut in_row = vec![false; t];
            let mut in_col = vec![false; t];
            for j in 0..t {
                if std::mem::replace(&mut in_row[self.grid[i][j]], true) {
                    return Err(Error::NotLatin(format!("duplicate symbol in row {}", i + 1)));
                }
                if std::mem::replace(&mut in_col[self.grid[j][i]], true) {
                    return Err(Error::NotLatin(format!("duplicate symbol in column {}", i + 1)));
                }
            }
        }
        Ok(())
    }

    /// Row `i` of the result is row `sigma^{-1}(i)` of `self`, i.e. row `i`
    /// moves to position `sigma(i)`.
    pub fn permute_rows(&self, sigma: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.order()];
        for (i, row) in self.grid.iter().enumerate() {
            out[sigma[i]] = row.clone();
        }
        out
    }

    /// 1-based nested JSON grid.
    pub fn to_json(&self) -> Value {
        grid_to_json(&self.grid)
    }
}

pub(crate) fn grid_to_json(grid: &[Vec<usize>]) -> Value {
    Value::Array(
        grid.iter()
            .map(|row| Value::Array(row.iter().map(|&s| Value::from(s + 1)).collect()))
            .collect(),
    )
}

struct Filler {
    t: usize,
    grid: Vec<usize>,
    row_used: Vec<u64>,
    col_used: Vec<u64>,
}

impl Filler {
    fn new(t: usize) -> Self {
        Filler {
            t,
            grid: vec![0; t * t],
            row_used: vec![0; t],
            col_used: vec![0; t],
        }
    }

    fn place(&mut self, cell: usize, s: usize) {
        let (i, j) = (cell / self.t, cell % self.t);
        self.grid[cell] = s;
        self.row_used[i] |= 1 << s;
        self.col_used[j] |= 1 << s;
    }

    fn unplace(&mut self, cell: usize, s: usize) {
        let (i, j) = (cell / self.t, cell % self.t);
        self.row_used[i] &= !(1 << s);
        self.col_used[j] &= !(1 << s);
    }

    fn free(&self, cell: usize) -> u64 {
        let (i, j) = (cell / self.t, cell % self.t);
        let all = if self.t == 64 { u64::MAX } else { (1u64 << self.t) - 1 };
        all & !(self.row_used[i] | self.col_used[j])
    }

    fn count(&mut self, cell: usize) -> u64 {
        if cell == self.t * self.t {
            return 1;
        }
        let mut free = self.free(cell);
        let mut total = 0;
        while free != 0 {
            let s = free.trailing_zeros() as usize;
            free &= free - 1;
            self.place(cell, s);
            total += self.count(cell + 1);
            self.unplace(cell, s);
        }
        total
    }

    /// Randomized depth-first fill; gives up after `budget` placements.
    fn random_fill(&mut self, cell: usize, rng: &mut Rng, budget: &mut u64) -> bool {
        if cell == self.t * self.t {
            return true;
        }
        let free = self.free(cell);
        let mut candidates: Vec<usize> = (0..self.t).filter(|&s| free >> s & 1 == 1).collect();
        candidates.shuffle(rng);
        for s in candidates {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            self.place(cell, s);
            if self.random_fill(cell + 1, rng, budget) {
                return true;
            }
            self.unplace(cell, s);
        }
        false
    }

    fn into_square(self) -> LatinSquare {
        LatinSquare {
            grid: self.grid.chunks(self.t).map(<[usize]>::to_vec).collect(),
        }
    }
}

/// Random Latin square of order `t` by randomized backtracking with restarts.
/// Deterministic per seed; not uniform.
pub fn random_latin(t: usize, seed: u64) -> Result<LatinSquare> {
    let mut rng = rng::seeded(seed);
    random_latin_with(t, &mut rng)
}

pub(crate) fn random_latin_with(t: usize, rng: &mut Rng) -> Result<LatinSquare> {
    if t == 0 || t > 64 {
        return Err(Error::InvalidParameter(format!("Latin square order must be in 1..=64, got {t}")));
    }
    let budget_per_try = 50 * (t * t) as u64;
    loop {
        let mut filler = Filler::new(t);
        let mut budget = budget_per_try;
        if filler.random_fill(0, rng, &mut budget) {
            let square = filler.into_square();
            debug_assert!(square.validate().is_ok());
            return Ok(square);
        }
    }
}

/// Exact number of Latin squares of order `t` (`t <= 5`) by exhaustive backtracking.
pub fn count_latin(t: usize) -> Result<u64> {
    if t == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    if t > 5 {
        return Err(Error::TooLarge(format!("exhaustive Latin square count limited to t <= 5, got {t}")));
    }
    Ok(Filler::new(t).count(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::perm::all_permutations;
    use std::collections::BTreeSet;

    /// Independent oracle: stack rows chosen from all permutations.
    fn all_latin_by_rows(t: usize) -> Vec<Vec<Vec<usize>>> {
        fn go(t: usize, perms: &[Vec<usize>], rows: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
            if rows.len() == t {
                out.push(rows.clone());
                return;
            }
            for p in perms {
                if rows.iter().all(|r| r.iter().zip(p).all(|(a, b)| a != b)) {
                    rows.push(p.clone());
                    go(t, perms, rows, out);
                    rows.pop();
                }
            }
        }
        let perms = all_permutations(t);
        let mut out = Vec::new();
        go(t, &perms, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn counts_match_row_stacking_oracle() {
        for t in 1..=4 {
            assert_eq!(count_latin(t).unwrap(), all_latin_by_rows(t).len() as u64);
        }
        assert_eq!(count_latin(3).unwrap(), 12);
        assert_eq!(count_latin(4).unwrap(), 576);
    }

    #[test]
    fn count_rejects_large_orders() {
        assert!(matches!(count_latin(6), Err(Error::TooLarge(_))));
        assert!(count_latin(0).is_err());
    }

    #[test]
    fn random_order_one() {
        assert_eq!(random_latin(1, 9).unwrap().rows(), &[vec![0]]);
    }

    #[test]
    fn random_order_three_is_one_of_twelve() {
        let all: BTreeSet<_> = all_latin_by_rows(3).into_iter().collect();
        assert_eq!(all.len(), 12);
        for seed in 0..30 {
            assert!(all.contains(random_latin(3, seed).unwrap().rows()));
        }
    }

    #[test]
    fn random_larger_orders_valid_and_deterministic() {
        for t in [5, 8, 10] {
            let a = random_latin(t, 42).unwrap();
            a.validate().unwrap();
            assert_eq!(a, random_latin(t, 42).unwrap());
        }
    }

    #[test]
    fn validation_errors() {
        assert!(LatinSquare::new(vec![vec![0, 0], vec![1, 1]]).is_err());
        assert!(LatinSquare::new(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(LatinSquare::new(vec![vec![0, 2], vec![2, 0]]).is_err());
    }

    #[test]
    fn row_permutation() {
        let l = LatinSquare::cyclic(3);
        let p = l.permute_rows(&[1, 2, 0]);
        assert_eq!(p[1], l.rows()[0]);
        assert_eq!(p[0], l.rows()[2]);
    }
}
