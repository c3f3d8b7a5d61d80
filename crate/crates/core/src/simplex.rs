//! Exact two-phase tableau simplex with Bland's rule, specialized to the
//! polytopes `{x >= 0 : E x = 1}` where `E` is the 0/1 constraint matrix.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive};

use crate::array::{Array, PolytopeSpec, Rational};
use crate::certify::constraint_matrix;
use crate::error::{Error, Result};
use crate::linalg::Echelon;

/// Exact field arithmetic that may report overflow.
trait Exact: Clone + PartialOrd + Signed + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv {}

impl<T> Exact for T where T: Clone + PartialOrd + Signed + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv {}

/// `i128` fractions for the common case; pivots that overflow restart in
/// [`Rational`].
type Small = Ratio<i128>;

#[derive(Clone, Debug)]
struct Tableau<T> {
    /// `m` rows of `[coefficients | rhs]`.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
}

impl<T: Exact> Tableau<T> {
    fn width(&self) -> usize {
        self.rows[0].len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize, objective: &mut [T]) -> Option<()> {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut().filter(|v| !v.is_zero()) {
                *v = v.checked_div(&p)?;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&k| !pivot_row[k].is_zero()).collect();
        let eliminate = |row: &mut [T]| -> Option<()> {
            if row[c].is_zero() {
                return Some(());
            }
            let f = row[c].clone();
            for &k in &nonzero {
                row[k] = row[k].checked_sub(&f.checked_mul(&pivot_row[k])?)?;
            }
            Some(())
        };
        for row in self.rows.iter_mut().filter(|row| !row.is_empty()) {
            eliminate(row)?;
        }
        eliminate(objective)?;
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        Some(())
    }

    /// Objective row `-c + c_B B^-1 A` for maximizing `c x`.
    fn objective_row(&self, c: &[T]) -> Option<Vec<T>> {
        let mut obj: Vec<T> = c.iter().map(|v| -v.clone()).collect();
        obj.push(T::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.rows[r]) {
                if !v.is_zero() {
                    *o = o.checked_add(&cb.checked_mul(v)?)?;
                }
            }
        }
        Some(obj)
    }

    /// Runs Bland's rule on columns `0..allowed` until optimal; `None` on
    /// overflow.
    fn optimize(&mut self, objective: &mut [T], allowed: usize) -> Option<usize> {
        let mut pivots = 0;
        loop {
            let Some(enter) = (0..allowed).find(|&j| objective[j].is_negative()) else {
                return Some(pivots);
            };
            let rhs = self.width();
            let mut leave: Option<(usize, T)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = row[rhs].checked_div(&row[enter])?;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let (r, _) = leave.expect("feasible region is bounded");
            self.pivot(r, enter, objective)?;
            pivots += 1;
        }
    }
}

fn to_small(q: &Rational) -> Option<Small> {
    Some(Small::new_raw(q.numer().to_i128()?, q.denom().to_i128()?))
}

fn to_big(q: &Small) -> Rational {
    Rational::new_raw((*q.numer()).into(), (*q.denom()).into())
}

fn map_tableau<A, B>(t: &Tableau<A>, f: impl Fn(&A) -> B) -> Tableau<B> {
    Tableau {
        rows: t.rows.iter().map(|row| row.iter().map(&f).collect()).collect(),
        basis: t.basis.clone(),
    }
}

/// Feasible basis of `E x = 1, x >= 0` for linearly independent 0/1 rows `E`, via an
/// artificial variable per row. `None` on overflow.
fn phase_one<T: Exact>(e: &[Vec<i64>], cells: usize) -> Option<Result<Tableau<T>>> {
    let m = e.len();
    let width = cells + m;
    let rows: Vec<Vec<T>> = e
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut row: Vec<T> = row.iter().map(|&v| if v == 0 { T::zero() } else { T::one() }).collect();
            row.extend((0..m).map(|a| if a == r { T::one() } else { T::zero() }));
            row.push(T::one());
            row
        })
        .collect();
    let mut tableau = Tableau {
        rows,
        basis: (cells..width).collect(),
    };
    let mut cost = vec![T::zero(); cells];
    cost.extend(std::iter::repeat_n(-T::one(), m));
    let mut objective = tableau.objective_row(&cost)?;
    tableau.optimize(&mut objective, width)?;
    if !objective[width].is_zero() {
        return Some(Err(Error::ConstructionFailed("constraint system is infeasible".into())));
    }
    // drive zero-valued artificials out; independence guarantees a pivot
    for r in 0..m {
        if tableau.basis[r] >= cells {
            let Some(c) = (0..cells).find(|&c| !tableau.rows[r][c].is_zero()) else {
                return Some(Err(Error::ConstructionFailed("redundant row survived".into())));
            };
            tableau.pivot(r, c, &mut objective)?;
        }
    }
    for row in &mut tableau.rows {
        let rhs = row.pop().expect("rhs");
        row.truncate(cells);
        row.push(rhs);
    }
    Some(Ok(tableau))
}

/// A feasible basis of the constraint system of one polytope, found once and
/// reused for every objective.
#[derive(Clone, Debug)]
pub struct LpSolver {
    spec: PolytopeSpec,
    tableau: Tableau<Rational>,
    small: Option<Tableau<Small>>,
    dropped_rows: usize,
}

/// Optimal vertex of one objective.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub point: Array,
    pub value: Rational,
    pub pivots: usize,
}

impl LpSolver {
    pub fn new(spec: PolytopeSpec) -> Result<Self> {
        let full = constraint_matrix(&spec);
        // independent rows: pivot columns of the transpose
        let cells = spec.cell_count();
        let transpose: Vec<Vec<i64>> = (0..cells).map(|c| full.iter().map(|row| row[c]).collect()).collect();
        let keep = Echelon::new(&transpose).pivot_columns().to_vec();
        let dropped_rows = full.len() - keep.len();

        let rows: Vec<Vec<i64>> = keep.iter().map(|&k| full[k].clone()).collect();
        let (tableau, small) = match phase_one::<Small>(&rows, cells) {
            Some(Ok(small)) => (map_tableau(&small, to_big), Some(small)),
            Some(Err(e)) => return Err(e),
            None => {
                let big = phase_one::<Rational>(&rows, cells).expect("exact")?;
                let small = big
                    .rows
                    .iter()
                    .map(|row| row.iter().map(to_small).collect::<Option<Vec<_>>>())
                    .collect::<Option<Vec<_>>>()
                    .map(|rows| Tableau {
                        rows,
                        basis: big.basis.clone(),
                    });
                (big, small)
            }
        };
        Ok(LpSolver {
            spec,
            small,
            tableau,
            dropped_rows,
        })
    }

    pub fn spec(&self) -> &PolytopeSpec {
        &self.spec
    }

    /// Equality rows kept after removing linearly dependent ones.
    pub fn rank(&self) -> usize {
        self.tableau.rows.len()
    }

    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    /// The starting basic feasible solution.
    pub fn initial_point(&self) -> Array {
        self.point_of(&self.tableau, Rational::clone)
    }

    fn point_of<T: Exact>(&self, t: &Tableau<T>, convert: impl Fn(&T) -> Rational) -> Array {
        let mut x = Array::zeros(self.spec.n, self.spec.d);
        let rhs = t.width();
        for (r, &b) in t.basis.iter().enumerate() {
            x.set_index(b, convert(&t.rows[r][rhs]));
        }
        x
    }

    /// Maximizes `c x` over the polytope; the result is a basic feasible
    /// solution, hence a vertex.
    pub fn maximize(&self, c: &[Rational]) -> Result<LpSolution> {
        let cells = self.spec.cell_count();
        if c.len() != cells {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} coefficients, expected {cells}",
                c.len()
            )));
        }
        if let Some(small) = &self.small {
            if let Some(sol) = self.maximize_small(small, c) {
                return Ok(sol);
            }
        }
        let mut t = self.tableau.clone();
        let mut objective = t.objective_row(c).expect("exact");
        let pivots = t.optimize(&mut objective, cells).expect("exact");
        Ok(LpSolution {
            point: self.point_of(&t, Rational::clone),
            value: objective[cells].clone(),
            pivots,
        })
    }

    fn maximize_small(&self, start: &Tableau<Small>, c: &[Rational]) -> Option<LpSolution> {
        let cells = self.spec.cell_count();
        let c: Vec<Small> = c.iter().map(to_small).collect::<Option<_>>()?;
        let mut t = start.clone();
        let mut objective = t.objective_row(&c)?;
        let pivots = t.optimize(&mut objective, cells)?;
        Some(LpSolution {
            point: self.point_of(&t, to_big),
            value: to_big(&objective[cells]),
            pivots,
        })
    }
}
