//! Exact double-description vertex enumeration for tiny instances.
//!
//! The polytope is written as `x = x0 + N y` with `N` a kernel basis of the
//! equality system and `x0` the barycenter. Homogenizing gives the pointed
//! cone `{(y, t) : t x0 + N y >= 0, t >= 0}`, whose extreme rays with `t > 0`
//! are the vertices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rank::constraint_matrix;
use crate::array::{Array, PolytopeSpec, Rational};
use crate::error::{Error, Result};
use crate::linalg::{self, Echelon};

const MAX_CELLS: usize = 32;

type Ray = Vec<BigInt>;

struct RayRecord {
    ray: Ray,
    /// Bit `i` set iff processed constraint `i` is tight.
    zeros: u64,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

fn primitive(mut v: Ray) -> Ray {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    v
}

/// Scale a rational row to a primitive integer row with the same sign pattern.
fn integer_row(row: &[Rational]) -> Ray {
    let lcm = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    primitive(row.iter().map(|q| (q * Rational::from_integer(lcm.clone())).to_integer()).collect())
}

/// Extreme rays of the pointed cone `{z : rows z >= 0}`.
fn double_description(rows: &[Ray], dim: usize) -> Vec<Ray> {
    assert!(rows.len() <= 64, "too many constraints for the bitset");
    // initial simplicial cone on `dim` independent rows
    let mut basis: Vec<usize> = Vec::new();
    let mut current: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = current.clone();
        trial.push(row.iter().map(|x| Rational::from_integer(x.clone())).collect());
        let mut reduced = trial.clone();
        if linalg::rref(&mut reduced).len() == trial.len() {
            current = trial;
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    assert_eq!(basis.len(), dim, "cone is not pointed");

    // rays: columns of the inverse of the basis rows
    let mut rays: Vec<RayRecord> = (0..dim)
        .map(|k| {
            let e: Vec<Rational> = (0..dim)
                .map(|i| if i == k { Rational::one() } else { Rational::zero() })
                .collect();
            let col = linalg::solve(&current, &e).expect("basis is invertible");
            let ray = integer_row(&col);
            let zeros = basis
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .fold(0u64, |z, (_, &b)| z | 1 << b);
            RayRecord { ray, zeros }
        })
        .collect();

    let mut processed: u64 = basis.iter().fold(0, |z, &b| z | 1 << b);
    for (i, row) in rows.iter().enumerate() {
        if processed >> i & 1 == 1 {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.ray)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        let mut next: Vec<RayRecord> = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let common = rays[p].zeros & rays[q].zeros;
                if (common.count_ones() as usize) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || r.zeros & common != common);
                if !adjacent {
                    continue;
                }
                let vp = &values[p];
                let vq = -&values[q];
                let ray: Ray = rays[p]
                    .ray
                    .iter()
                    .zip(&rays[q].ray)
                    .map(|(a, b)| &vq * a + vp * b)
                    .collect();
                next.push(RayRecord {
                    ray: primitive(ray),
                    zeros: common | 1 << i,
                });
            }
        }
        for (k, r) in rays.into_iter().enumerate() {
            if values[k].is_positive() {
                next.push(r);
            } else if values[k].is_zero() {
                next.push(RayRecord {
                    zeros: r.zeros | 1 << i,
                    ray: r.ray,
                });
            }
        }
        rays = next;
        processed |= 1 << i;
    }
    rays.into_iter().map(|r| r.ray).collect()
}

/// All vertices of a tiny polytope (`n^(d+1) <= 32` cells), sorted by entries.
pub fn enumerate_vertices(spec: &PolytopeSpec) -> Result<Vec<Array>> {
    let cells = spec.cell_count();
    if cells > MAX_CELLS {
        return Err(Error::TooLarge(format!(
            "enumeration supports at most {MAX_CELLS} cells, {spec:?} has {cells}"
        )));
    }
    let x0 = spec.barycenter();
    let kernel = Echelon::new(&constraint_matrix(spec)).kernel_basis();
    if kernel.is_empty() {
        return Ok(vec![x0]);
    }
    let dim = kernel.len() + 1;
    // cell c: sum_j N[j][c] y_j + x0_c t >= 0, then t >= 0
    let mut rows: Vec<Ray> = (0..cells)
        .map(|c| {
            let row: Vec<Rational> = kernel
                .iter()
                .map(|v| v[c].clone())
                .chain(std::iter::once(x0.get_index(c).clone()))
                .collect();
            integer_row(&row)
        })
        .collect();
    let mut t_row = vec![BigInt::zero(); dim];
    t_row[dim - 1] = BigInt::one();
    rows.push(t_row);

    let mut vertices: Vec<Array> = double_description(&rows, dim)
        .into_iter()
        .filter(|r| r[dim - 1].is_positive())
        .map(|r| {
            let t = Rational::from_integer(r[dim - 1].clone());
            let entries = (0..cells)
                .map(|c| {
                    kernel.iter().zip(&r).fold(x0.get_index(c).clone(), |acc, (v, y)| {
                        acc + &v[c] * Rational::from_integer(y.clone()) / &t
                    })
                })
                .collect();
            Array::from_entries(spec.n, spec.d, entries).expect("cell count")
        })
        .collect();
    vertices.sort_by(|a, b| a.entries().cmp(b.entries()));
    vertices.dedup();
    Ok(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::is_vertex_rank;
    use crate::fixtures::sigma_example_2x2x2;
    use std::collections::BTreeSet;

    /// Independent oracle: a vertex is the unique solution of the equality
    /// system restricted to its support, positive on that support.
    fn vertices_by_support_search(spec: &PolytopeSpec) -> BTreeSet<Vec<Rational>> {
        let e = constraint_matrix(spec);
        let cells = spec.cell_count();
        let mut out = BTreeSet::new();
        for mask in 1u64..(1 << cells) {
            let cols: Vec<usize> = (0..cells).filter(|&c| mask >> c & 1 == 1).collect();
            let mut aug: Vec<Vec<Rational>> = e
                .iter()
                .map(|row| {
                    cols.iter()
                        .map(|&c| Rational::from_integer(row[c].into()))
                        .chain(std::iter::once(Rational::one()))
                        .collect()
                })
                .collect();
            let pivots = linalg::rref(&mut aug);
            if pivots.len() != cols.len() || pivots.contains(&cols.len()) {
                continue;
            }
            let sol: Vec<Rational> = aug.iter().map(|r| r[cols.len()].clone()).collect();
            if sol.iter().all(|x| x.is_positive()) {
                let mut full = vec![Rational::zero(); cells];
                for (&c, x) in cols.iter().zip(sol) {
                    full[c] = x;
                }
                out.insert(full);
            }
        }
        out
    }

    fn check_against_oracle(spec: PolytopeSpec) -> Vec<Array> {
        let found = enumerate_vertices(&spec).unwrap();
        let set: BTreeSet<Vec<Rational>> = found.iter().map(|a| a.entries().to_vec()).collect();
        assert_eq!(set.len(), found.len(), "duplicates");
        assert_eq!(set, vertices_by_support_search(&spec), "{spec:?}");
        for v in &found {
            assert!(is_vertex_rank(v, &spec).unwrap().is_vertex);
        }
        found
    }

    #[test]
    fn birkhoff_small() {
        assert_eq!(check_against_oracle(PolytopeSpec::omega(2, 1)).len(), 2);
        let v3 = check_against_oracle(PolytopeSpec::omega(3, 1));
        assert_eq!(v3.len(), 6);
        assert!(v3.iter().all(Array::is_zero_one));
    }

    #[test]
    fn tristochastic_order_two() {
        let v = check_against_oracle(PolytopeSpec::omega(2, 2));
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(Array::is_zero_one));
    }

    #[test]
    fn sigma_order_two_contains_t_and_half_array() {
        let v = check_against_oracle(PolytopeSpec::sigma(2, 2));
        let zero_one = v.iter().filter(|a| a.is_zero_one()).count();
        assert_eq!(zero_one, 4);
        assert!(v.contains(&sigma_example_2x2x2()));
    }

    #[test]
    fn degenerate_order_one() {
        let v = enumerate_vertices(&PolytopeSpec::omega(1, 2)).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].get(&[0, 0, 0]).is_one());
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            enumerate_vertices(&PolytopeSpec::omega(4, 2)),
            Err(Error::TooLarge(_))
        ));
    }
}
