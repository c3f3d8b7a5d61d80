use num_traits::{Signed, Zero};

use super::{Method, VertexCertificate};
use crate::array::{Array, PolytopeSpec, Rational};
use crate::error::{Error, Result};
use crate::linalg::Echelon;

/// 0/1 matrix with one row per constraint set and one column per cell.
pub fn constraint_matrix(spec: &PolytopeSpec) -> Vec<Vec<i64>> {
    let cells = spec.cell_count();
    spec.constraint_groups()
        .into_iter()
        .map(|group| {
            let mut row = vec![0; cells];
            for i in group {
                row[i] = 1;
            }
            row
        })
        .collect()
}

/// Rank of the equality system; `cells - rank` is the affine dimension.
pub fn constraint_rank(spec: &PolytopeSpec) -> usize {
    Echelon::new(&constraint_matrix(spec)).rank()
}

/// A member is a vertex iff the constraint columns of its support are
/// linearly independent. Otherwise a kernel vector `v` supported on the
/// support gives the witness `A +- t v`, with `t` half the largest step
/// that keeps both points nonnegative.
pub fn is_vertex_rank(a: &Array, spec: &PolytopeSpec) -> Result<VertexCertificate> {
    if !a.is_member(spec)? {
        return Err(Error::NotMember(spec.kind.to_string()));
    }
    let support = a.support_indices();
    let mut col_of = vec![usize::MAX; a.entries().len()];
    for (c, &i) in support.iter().enumerate() {
        col_of[i] = c;
    }
    let matrix: Vec<Vec<i64>> = spec
        .constraint_groups()
        .into_iter()
        .map(|group| {
            let mut row = vec![0; support.len()];
            for i in group {
                if col_of[i] != usize::MAX {
                    row[col_of[i]] = 1;
                }
            }
            row
        })
        .collect();
    let Some(kernel) = Echelon::new(&matrix).kernel_vector() else {
        return Ok(VertexCertificate::vertex(Method::RankTest));
    };

    let max_step = support
        .iter()
        .zip(&kernel)
        .filter(|(_, v)| !v.is_zero())
        .map(|(&i, v)| a.get_index(i) / v.abs())
        .min()
        .expect("kernel vector is nonzero");
    let step = max_step / Rational::from_integer(2.into());
    let mut direction = vec![Rational::zero(); a.entries().len()];
    for (&i, v) in support.iter().zip(kernel) {
        direction[i] = v;
    }
    let x = a.offset(&direction, &step);
    let y = a.offset(&direction, &-step);
    Ok(VertexCertificate::non_vertex(Method::RankTest, x, y))
}
