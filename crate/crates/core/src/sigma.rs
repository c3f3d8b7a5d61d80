//! Vertices of the hyperplane-stochastic polytope `Sigma_n^(2)` outside the
//! 0/1 vertex family `T_n^(2)`, and the bijection from permutation tuples
//! onto `T_n^(d)`.

use num_traits::One;
use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::array::{Array, PolytopeSpec, Rational};
use crate::certify::{build_support_graph, is_vertex_graph, is_vertex_rank, GraphMode, VertexCertificate};
use crate::designs::perm::is_permutation;
use crate::designs::{is_single_alternating_cycle, HCycle};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// `n x n` grid over `0..=n`; a nonzero `k` at `(i, j)` stands for
/// `A(i, j, k - 1) = 1/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolMatrix {
    grid: Vec<Vec<usize>>,
}

impl SymbolMatrix {
    /// Validates two nonzero entries per row and column, each symbol twice,
    /// and a single H-cycle of nonzero cells.
    pub fn new(grid: Vec<Vec<usize>>) -> Result<Self> {
        let n = grid.len();
        if n < 2 || grid.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("symbol matrix must be square with n >= 2".into()));
        }
        let mut counts = vec![0usize; n + 1];
        let mut cells = Vec::with_capacity(2 * n);
        for (i, row) in grid.iter().enumerate() {
            for (j, &s) in row.iter().enumerate() {
                if s > n {
                    return Err(Error::InvalidParameter(format!("symbol {s} exceeds n = {n}")));
                }
                if s != 0 {
                    counts[s] += 1;
                    cells.push((i, j));
                }
            }
        }
        if counts[1..].iter().any(|&c| c != 2) {
            return Err(Error::InvalidParameter("every symbol must appear exactly twice".into()));
        }
        if !is_single_alternating_cycle(&cells, n) {
            return Err(Error::InvalidParameter("nonzero cells must form one H-cycle".into()));
        }
        Ok(SymbolMatrix { grid })
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

    pub fn to_json(&self) -> Value {
        json!(self.grid)
    }
}

/// Plants `M(i1,j1) = M(i2,j2) = 1`, `M(i2,j1) = 2` on the H-cycle and fills
/// the other `2n - 3` cells with a shuffle of `{2, 3, 3, .., n, n}`.
pub fn build_symbol_matrix(h: &HCycle, seed: u64) -> SymbolMatrix {
    build_symbol_matrix_with(h, &mut rng::seeded(seed))
}

fn build_symbol_matrix_with(h: &HCycle, rng: &mut Rng) -> SymbolMatrix {
    let mut multiset = filling_multiset(h.order());
    multiset.shuffle(rng);
    fill_symbol_matrix(h, &multiset)
}

fn filling_multiset(n: usize) -> Vec<usize> {
    std::iter::once(2).chain((3..=n).flat_map(|s| [s, s])).collect()
}

/// Cells after the planted triangle, in cycle order, receive `rest`.
fn fill_symbol_matrix(h: &HCycle, rest: &[usize]) -> SymbolMatrix {
    let n = h.order();
    let cells = h.cells();
    // cycle order: (i1,j1), (i2,j1), (i2,j2), ...
    let mut grid = vec![vec![0; n]; n];
    grid[cells[0].0][cells[0].1] = 1;
    grid[cells[1].0][cells[1].1] = 2;
    grid[cells[2].0][cells[2].1] = 1;
    for (&(i, j), &s) in cells[3..].iter().zip(rest) {
        grid[i][j] = s;
    }
    SymbolMatrix::new(grid).expect("construction keeps the invariants")
}

/// `A(i, j, M(i, j) - 1) = 1/2` on the nonzero cells of `M`.
pub fn symbol_matrix_to_array(m: &SymbolMatrix) -> Array {
    grid_to_array(m.rows())
}

fn grid_to_array(grid: &[Vec<usize>]) -> Array {
    let n = grid.len();
    let half = Rational::new(1.into(), 2.into());
    let mut a = Array::zeros(n, 2);
    for (i, row) in grid.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if s != 0 {
                a.set(&[i, j, s - 1], half.clone());
            }
        }
    }
    a
}

/// 0/1 member of `Sigma_n^(d)` with a single one per coordinate hyperplane.
pub fn is_in_t(a: &Array) -> bool {
    a.is_zero_one() && a.is_member(&PolytopeSpec::sigma(a.n(), a.d())).unwrap_or(false)
}

/// Random H-cycle, symbol matrix and array, certified by the rank test after
/// checking that the hyperplane graph is connected and not bipartite.
pub fn construct_sigma_vertex(n: usize, seed: u64) -> Result<(Array, VertexCertificate)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("construction needs n >= 2, got {n}")));
    }
    let mut rng = rng::seeded(seed);
    let h = HCycle::random(n, &mut rng)?;
    let m = build_symbol_matrix_with(&h, &mut rng);
    let a = symbol_matrix_to_array(&m);
    let g = build_support_graph(&a, GraphMode::Hyperplane);
    if !g.is_connected() || g.is_bipartite() {
        return Err(Error::ConstructionFailed("hyperplane graph is disconnected or bipartite".into()));
    }
    let spec = PolytopeSpec::sigma(n, 2);
    let cert = is_vertex_rank(&a, &spec)?;
    if !cert.is_vertex || !is_vertex_graph(&a, &spec)?.is_vertex {
        return Err(Error::ConstructionFailed("constructed array is not a vertex".into()));
    }
    if is_in_t(&a) {
        return Err(Error::ConstructionFailed("constructed array lies in T".into()));
    }
    Ok((a, cert))
}

/// Array with a one at `(i, s_1(i), .., s_d(i))` for every `i`.
pub fn tuple_to_t_array(permutations: &[Vec<usize>]) -> Result<Array> {
    let d = permutations.len();
    if d == 0 {
        return Err(Error::InvalidParameter("need at least one permutation".into()));
    }
    let n = permutations[0].len();
    if n == 0 || permutations.iter().any(|p| p.len() != n || !is_permutation(p)) {
        return Err(Error::InvalidParameter("entries must be permutations of one order n >= 1".into()));
    }
    let mut a = Array::zeros(n, d);
    for i in 0..n {
        let coords: Vec<usize> = std::iter::once(i).chain(permutations.iter().map(|p| p[i])).collect();
        a.set(&coords, Rational::one());
    }
    Ok(a)
}

/// Array with two `1/2` per coordinate hyperplane whose support is a random
/// 2-factor of the grid (not necessarily one H-cycle) carrying each layer
/// symbol twice in random order. Used to probe the certifiers on inputs the
/// construction does not guarantee to be vertices.
pub fn random_half_array(n: usize, seed: u64) -> Result<Array> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let mut rng = rng::seeded(seed);
    let factor = crate::designs::random_regular_bipartite(n, 2, rng::mix(seed, 1))?;
    let mut symbols: Vec<usize> = (1..=n).flat_map(|s| [s, s]).collect();
    symbols.shuffle(&mut rng);
    let mut grid = vec![vec![0; n]; n];
    for ((i, j), s) in factor.edges().into_iter().zip(symbols) {
        grid[i][j] = s;
    }
    Ok(grid_to_array(&grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::enumerate_h_cycles;
    use crate::designs::perm::all_permutations;
    use crate::fixtures::sigma_example_2x2x2;
    use std::collections::BTreeSet;

    /// Distinct orderings of a multiset by exhaustive permutation of positions.
    fn all_fillings(n: usize) -> BTreeSet<Vec<usize>> {
        let base = filling_multiset(n);
        all_permutations(base.len())
            .into_iter()
            .map(|p| p.iter().map(|&k| base[k]).collect())
            .collect()
    }

    #[test]
    fn order_two_matches_fixture() {
        let h = &enumerate_h_cycles(2).unwrap()[0];
        let m = build_symbol_matrix(h, 0);
        assert_eq!(m.rows(), &[vec![1, 2], vec![2, 1]]);
        let a = symbol_matrix_to_array(&m);
        assert_eq!(a, sigma_example_2x2x2());
        let (b, cert) = construct_sigma_vertex(2, 5).unwrap();
        assert_eq!(b, a);
        assert!(cert.is_vertex);
    }

    #[test]
    fn invariants_n4() {
        for seed in 0..50 {
            let mut r = rng::seeded(seed);
            let h = HCycle::random(4, &mut r).unwrap();
            let m = build_symbol_matrix(&h, seed);
            assert!(SymbolMatrix::new(m.rows().to_vec()).is_ok());
            let c = h.cells();
            assert_eq!(m.get(c[0].0, c[0].1), 1);
            assert_eq!(m.get(c[2].0, c[2].1), 1);
            assert_eq!(m.get(c[1].0, c[1].1), 2);
        }
    }

    #[test]
    fn filling_count_n3() {
        // (2n - 3)! / 2^(n - 2) = 3
        assert_eq!(all_fillings(3).len(), 3);
        assert_eq!(all_fillings(4).len(), 5 * 4 * 3 * 2 / 4);
    }

    #[test]
    fn multiplicity_n3() {
        let mut arrays = BTreeSet::new();
        for h in enumerate_h_cycles(3).unwrap() {
            for rest in all_fillings(3) {
                let a = symbol_matrix_to_array(&fill_symbol_matrix(&h, &rest));
                arrays.insert(a.entries().to_vec());
            }
        }
        assert_eq!(arrays.len(), 18);
    }

    #[test]
    fn constructed_vertices() {
        for n in [3, 4, 5] {
            for seed in 0..20 {
                let (a, cert) = construct_sigma_vertex(n, seed).unwrap();
                assert!(cert.is_vertex);
                assert_eq!(a.support().len(), 2 * n);
                assert!(!is_in_t(&a));
                assert!(a.is_member(&PolytopeSpec::sigma(n, 2)).unwrap());
            }
        }
        assert!(construct_sigma_vertex(1, 0).is_err());
    }

    #[test]
    fn graph_and_rank_agree_on_random_half_arrays() {
        let mut non_vertices = 0;
        for seed in 0..100 {
            let n = 2 + (seed as usize % 5);
            let a = random_half_array(n, seed).unwrap();
            let spec = PolytopeSpec::sigma(n, 2);
            let g = is_vertex_graph(&a, &spec).unwrap();
            let r = is_vertex_rank(&a, &spec).unwrap();
            assert_eq!(g.is_vertex, r.is_vertex, "seed {seed}");
            assert!(g.witness_is_valid(&a, &spec) && r.witness_is_valid(&a, &spec));
            non_vertices += usize::from(!r.is_vertex);
        }
        assert!(non_vertices > 0);
    }

    #[test]
    fn t_arrays() {
        let id = vec![0, 1, 2];
        let a = tuple_to_t_array(&[id.clone(), id]).unwrap();
        for i in 0..3 {
            assert!(a.get(&[i, i, i]).is_one());
        }
        let perms = all_permutations(2);
        let mut seen = BTreeSet::new();
        for p in &perms {
            for q in &perms {
                let a = tuple_to_t_array(&[p.clone(), q.clone()]).unwrap();
                assert!(is_in_t(&a));
                assert!(is_vertex_rank(&a, &PolytopeSpec::sigma(2, 2)).unwrap().is_vertex);
                seen.insert(a.entries().to_vec());
            }
        }
        assert_eq!(seen.len(), 4);
        assert!(tuple_to_t_array(&[vec![0, 0]]).is_err());
        assert!(tuple_to_t_array(&[]).is_err());
    }

    #[test]
    fn rejects_bad_symbol_matrices() {
        assert!(SymbolMatrix::new(vec![vec![1, 1], vec![2, 2]]).is_ok());
        assert!(SymbolMatrix::new(vec![vec![1, 2], vec![2, 3]]).is_err());
        // two 4-cycles instead of one 8-cycle
        let grid = vec![vec![1, 1, 0, 0], vec![2, 2, 0, 0], vec![0, 0, 3, 3], vec![0, 0, 4, 4]];
        assert!(SymbolMatrix::new(grid).is_err());
    }
}
