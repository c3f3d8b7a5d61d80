use serde_json::Value;

use super::latin::{grid_to_json, random_latin_with, LatinSquare};
use super::perm::{is_permutation, is_single_cycle, random_cyclic};
use crate::error::{Error, Result};
use crate::rng::{self};

/// `n x n` grid (`n` even) over the symbols `0..n/2`, each symbol exactly
/// twice in every row and every column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DoubleLatinSquare {
    grid: Vec<Vec<usize>>,
}

impl DoubleLatinSquare {
    pub fn new(grid: Vec<Vec<usize>>) -> Result<Self> {
        let n = grid.len();
        let bad = |msg: String| Err(Error::InvalidParameter(format!("not a double Latin square: {msg}")));
        if n == 0 || !n.is_multiple_of(2) {
            return bad(format!("order {n} is not a positive even number"));
        }
        if grid.iter().any(|r| r.len() != n) {
            return bad("grid is not square".into());
        }
        let half = n / 2;
        for i in 0..n {
            let mut row = vec![0; half];
            let mut col = vec![0; half];
            for j in 0..n {
                for (count, s) in [(&mut row, grid[i][j]), (&mut col, grid[j][i])] {
                    if s >= half {
                        return bad(format!("symbol {} out of range", s + 1));
                    }
                    count[s] += 1;
                }
            }
            if row.iter().chain(&col).any(|&c| c != 2) {
                return bad(format!("line {} does not hold every symbol twice", i + 1));
            }
        }
        Ok(DoubleLatinSquare { grid })
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

    /// Cells holding `symbol`, row-major.
    pub fn symbol_cells(&self, symbol: usize) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.grid[i][j] == symbol)
            .collect()
    }

    /// Every symbol's cells form a single H-cycle.
    pub fn is_hamiltonian(&self) -> bool {
        let n = self.order();
        (0..n / 2).all(|k| is_single_alternating_cycle(&self.symbol_cells(k), n))
    }

    pub fn to_json(&self) -> Value {
        grid_to_json(&self.grid)
    }

    /// Block construction from two random Latin squares of order `n/2` and a
    /// random cyclic row permutation; always Hamiltonian.
    pub fn random_hamiltonian(n: usize, seed: u64) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("double Latin squares need even n >= 2, got {n}")));
        }
        let mut rng = rng::seeded(seed);
        let a = random_latin_with(n / 2, &mut rng)?;
        let b = random_latin_with(n / 2, &mut rng)?;
        let sigma = random_cyclic(n / 2, &mut rng);
        double_latin_from(&a, &b, &sigma)
    }
}

/// True iff `cells` (as edges between rows and columns of an `n x n` grid)
/// give every row and column degree 2 and form one connected cycle.
pub fn is_single_alternating_cycle(cells: &[(usize, usize)], n: usize) -> bool {
    if cells.len() != 2 * n {
        return false;
    }
    let mut row_cells = vec![Vec::new(); n];
    let mut col_cells = vec![Vec::new(); n];
    for (k, &(i, j)) in cells.iter().enumerate() {
        row_cells[i].push(k);
        col_cells[j].push(k);
    }
    if row_cells.iter().chain(&col_cells).any(|v| v.len() != 2) {
        return false;
    }
    // walk: leave each cell through the line we did not enter by
    let mut visited = 1;
    let mut current = 0;
    let mut via_row = true;
    loop {
        let (i, j) = cells[current];
        let line = if via_row { &row_cells[i] } else { &col_cells[j] };
        let next = if line[0] == current { line[1] } else { line[0] };
        via_row = !via_row;
        if next == 0 {
            return visited == 2 * n;
        }
        visited += 1;
        current = next;
    }
}

/// Block matrix `[[A, B], [sigma(A), B]]` with `sigma` acting on the rows of `A`.
pub fn double_latin_from(a: &LatinSquare, b: &LatinSquare, sigma: &[usize]) -> Result<DoubleLatinSquare> {
    let t = a.order();
    if b.order() != t || sigma.len() != t {
        return Err(Error::DimensionMismatch(format!(
            "orders differ: A={t}, B={}, sigma={}",
            b.order(),
            sigma.len()
        )));
    }
    if !is_permutation(sigma) || !is_single_cycle(sigma) {
        return Err(Error::InvalidParameter("sigma must be a single cycle".into()));
    }
    let shifted = a.permute_rows(sigma);
    let mut grid = Vec::with_capacity(2 * t);
    for i in 0..t {
        grid.push(a.rows()[i].iter().chain(&b.rows()[i]).copied().collect());
    }
    for i in 0..t {
        grid.push(shifted[i].iter().chain(&b.rows()[i]).copied().collect());
    }
    DoubleLatinSquare::new(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::random_latin;

    #[test]
    fn order_four_example() {
        let l = LatinSquare::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let x = double_latin_from(&l, &l, &[1, 0]).unwrap();
        assert_eq!(x.order(), 4);
        assert!(x.is_hamiltonian());
    }

    #[test]
    fn block_diagonal_is_not_hamiltonian() {
        let x = DoubleLatinSquare::new(vec![
            vec![0, 0, 1, 1],
            vec![0, 0, 1, 1],
            vec![1, 1, 0, 0],
            vec![1, 1, 0, 0],
        ])
        .unwrap();
        assert!(!x.is_hamiltonian());
    }

    #[test]
    fn order_two_all_ones_is_hamiltonian() {
        let x = DoubleLatinSquare::new(vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert!(x.is_hamiltonian());
    }

    #[test]
    fn identity_sigma_rejected() {
        let l = LatinSquare::cyclic(3);
        assert!(double_latin_from(&l, &l, &[0, 1, 2]).is_err());
        assert!(double_latin_from(&l, &LatinSquare::cyclic(2), &[1, 2, 0]).is_err());
    }

    #[test]
    fn twelve_with_random_squares() {
        for seed in 0..50 {
            let a = random_latin(6, seed).unwrap();
            let b = random_latin(6, seed + 1000).unwrap();
            let mut rng = crate::rng::seeded(seed);
            let sigma = random_cyclic(6, &mut rng);
            assert!(double_latin_from(&a, &b, &sigma).unwrap().is_hamiltonian());
        }
    }

    #[test]
    fn rejects_invalid_grids() {
        assert!(DoubleLatinSquare::new(vec![vec![0; 3]; 3]).is_err());
        assert!(DoubleLatinSquare::new(vec![vec![0, 1], vec![1, 0]]).is_err());
    }
}
