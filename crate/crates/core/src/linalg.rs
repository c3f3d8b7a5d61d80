//! Exact linear algebra: integer-preserving elimination for rank and kernel
//! computations on integer matrices, plus a small rational row reduction.
//!
//! Elimination first runs on `i64` with checked arithmetic and restarts on
//! `BigInt` if any intermediate value overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, One, Signed, Zero};

use crate::array::Rational;

trait ExactInt: Integer + Signed + Clone + CheckedMul + CheckedSub + Into<BigInt> {}
impl ExactInt for i64 {}
impl ExactInt for BigInt {}

/// Integer matrix in reduced echelon form: every pivot column is zero outside
/// its pivot row.
#[derive(Debug, Clone)]
pub struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

impl Echelon {
    pub fn new(matrix: &[Vec<i64>]) -> Self {
        let cols = matrix.first().map_or(0, Vec::len);
        assert!(matrix.iter().all(|r| r.len() == cols), "ragged matrix");
        if let Some((rows, pivots)) = reduce(matrix.to_vec(), cols) {
            return Echelon {
                rows: widen(rows),
                pivots,
                cols,
            };
        }
        let big = matrix
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let (rows, pivots) = reduce(big, cols).expect("BigInt elimination cannot overflow");
        Echelon { rows, pivots, cols }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    fn kernel_vector_for(&self, free: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.cols];
        v[free] = Rational::one();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if !row[free].is_zero() {
                v[pc] = -Rational::new(row[free].clone(), row[pc].clone());
            }
        }
        v
    }

    /// A basis of the right kernel, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        self.free_columns()
            .into_iter()
            .map(|f| self.kernel_vector_for(f))
            .collect()
    }

    /// Some nonzero kernel vector, or `None` when the columns are independent.
    pub fn kernel_vector(&self) -> Option<Vec<Rational>> {
        self.free_columns()
            .first()
            .map(|&f| self.kernel_vector_for(f))
    }
}

fn widen<T: ExactInt>(rows: Vec<Vec<T>>) -> Vec<Vec<BigInt>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(Into::into).collect())
        .collect()
}

fn content<T: ExactInt>(row: &[T]) -> T {
    row.iter().fold(T::zero(), |g, v| g.gcd(v))
}

/// Fraction-free Gauss-Jordan elimination. Each row update is
/// `row <- (p/g) row - (a/g) pivot_row` followed by division by the row
/// content, so entries stay integral and small. Returns `None` on overflow.
fn reduce<T: ExactInt>(mut m: Vec<Vec<T>>, cols: usize) -> Option<(Vec<Vec<T>>, Vec<usize>)> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let Some(best) = (rank..m.len())
            .filter(|&r| !m[r][col].is_zero())
            .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()))
        else {
            continue;
        };
        m.swap(rank, best);
        let pivot_row = m[rank].clone();
        let p = pivot_row[col].clone();
        let support: Vec<usize> = (0..cols).filter(|&c| !pivot_row[c].is_zero()).collect();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            let g = p.gcd(&a);
            let (pm, am) = (p.div_floor(&g), a.div_floor(&g));
            if !pm.is_one() {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = v.checked_mul(&pm)?;
                    }
                }
            }
            for &c in &support {
                let t = pivot_row[c].checked_mul(&am)?;
                row[c] = row[c].checked_sub(&t)?;
            }
            let g = content(row);
            if !g.is_zero() && !g.is_one() {
                for v in row.iter_mut() {
                    *v = v.div_floor(&g);
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    m.truncate(rank);
    Some((m, pivots))
}

/// Rank over the rationals of an integer matrix.
pub fn rank(matrix: &[Vec<i64>]) -> usize {
    Echelon::new(matrix).rank()
}

/// Reduced row echelon form over the rationals. Returns the pivot columns;
/// `m` is reduced in place and truncated to its nonzero rows.
pub fn rref(m: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let Some(r) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, r);
        let inv = m[rank][col].recip();
        for v in m[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    m.truncate(rank);
    pivots
}

/// Unique solution of a square nonsingular rational system, `None` if singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_vec(m: &[Vec<i64>], v: &[Rational]) -> Vec<Rational> {
        m.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (&a, x)| acc + x * Rational::from_integer(a.into()))
            })
            .collect()
    }

    #[test]
    fn rank_small() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 0], vec![0, 1], vec![1, 1]]), 2);
        assert_eq!(rank(&[vec![0, 0, 0]]), 0);
        // Birkhoff constraint matrix of order 3 has rank 2n - 1
        let mut m = Vec::new();
        for i in 0..3 {
            m.push((0..9).map(|c| i64::from(c / 3 == i)).collect());
            m.push((0..9).map(|c| i64::from(c % 3 == i)).collect());
        }
        assert_eq!(rank(&m), 5);
    }

    #[test]
    fn kernel_vectors_are_kernel() {
        let m = vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 1]];
        let e = Echelon::new(&m);
        assert_eq!(e.rank(), 3);
        let v = e.kernel_vector().unwrap();
        assert!(v.iter().any(|x| !x.is_zero()));
        assert!(mat_vec(&m, &v).iter().all(Zero::is_zero));
        assert_eq!(e.kernel_basis().len(), 1);
    }

    #[test]
    fn full_column_rank_has_no_kernel() {
        let m = vec![vec![2, 1], vec![1, 3], vec![0, 1]];
        assert!(Echelon::new(&m).kernel_vector().is_none());
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        // Hilbert-like integer matrix with huge entries forces the BigInt path.
        let big = i64::MAX / 3;
        let m = vec![vec![big, big - 1, 7], vec![big - 5, big, 11], vec![3, 5, big]];
        assert_eq!(rank(&m), 3);
        let m2 = vec![vec![big, big - 1], vec![2 * (big / 2), 2 * ((big - 1) / 2)]];
        assert_eq!(rank(&m2), 2);
    }

    #[test]
    fn solve_square() {
        let r = |v: i64| Rational::from_integer(v.into());
        let a = vec![vec![r(2), r(1)], vec![r(1), r(3)]];
        let x = solve(&a, &[r(1), r(2)]).unwrap();
        assert_eq!(x, vec![Rational::new(1.into(), 5.into()), Rational::new(3.into(), 5.into())]);
        assert!(solve(&[vec![r(1), r(2)], vec![r(2), r(4)]], &[r(1), r(2)]).is_none());
    }
}
