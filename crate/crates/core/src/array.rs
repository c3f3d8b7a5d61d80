//! Dense `(d+1)`-way arrays of exact rationals and the two polytopes they live in.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::designs::LatinSquare;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Which family of sums defines the polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Every line sums to one.
    Omega,
    /// Every coordinate hyperplane sums to one.
    Sigma,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Omega => write!(f, "omega"),
            Kind::Sigma => write!(f, "sigma"),
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" => Ok(Kind::Omega),
            "sigma" => Ok(Kind::Sigma),
            other => Err(Error::InvalidParameter(format!("unknown polytope kind `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolytopeSpec {
    pub kind: Kind,
    pub n: usize,
    pub d: usize,
}

impl PolytopeSpec {
    pub fn new(kind: Kind, n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        cell_count(n, d)?;
        Ok(PolytopeSpec { kind, n, d })
    }

    pub fn omega(n: usize, d: usize) -> Self {
        Self::new(Kind::Omega, n, d).expect("valid omega spec")
    }

    pub fn sigma(n: usize, d: usize) -> Self {
        Self::new(Kind::Sigma, n, d).expect("valid sigma spec")
    }

    pub fn cell_count(&self) -> usize {
        self.n.pow(self.d as u32 + 1)
    }

    /// Index sets whose entries must sum to one: lines for `Omega`,
    /// coordinate hyperplanes for `Sigma`. Lines are grouped by the axis
    /// along which they vary.
    pub fn constraint_groups(&self) -> Vec<Vec<usize>> {
        let shape = Shape::new(self.n, self.d);
        let mut groups = Vec::new();
        for axis in 0..=self.d {
            match self.kind {
                Kind::Omega => groups.extend(shape.lines(axis)),
                Kind::Sigma => {
                    groups.extend((0..self.n).map(|v| shape.hyperplane_indices(axis, v)))
                }
            }
        }
        groups
    }

    /// The uniform array, always a member.
    pub fn barycenter(&self) -> Array {
        let per_group = match self.kind {
            Kind::Omega => self.n,
            Kind::Sigma => self.n.pow(self.d as u32),
        };
        let value = Rational::new(1.into(), per_group.into());
        Array {
            n: self.n,
            d: self.d,
            entries: vec![value; self.cell_count()],
        }
    }
}

fn cell_count(n: usize, d: usize) -> Result<usize> {
    n.checked_pow(d as u32 + 1)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::TooLarge(format!("n={n}, d={d} has too many cells")))
}

/// Affine dimension of `Omega`, `(n-1)^(d+1)`.
pub fn affine_dimension(spec: &PolytopeSpec) -> Result<u64> {
    if spec.kind != Kind::Omega {
        return Err(Error::Precondition(
            "closed-form affine dimension is only defined for omega".into(),
        ));
    }
    (spec.n as u64 - 1)
        .checked_pow(spec.d as u32 + 1)
        .ok_or_else(|| Error::TooLarge("affine dimension overflows u64".into()))
}

/// A position in the array, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(pub Vec<usize>);

impl Cell {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based, as in the file format
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c + 1)?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Shape {
    n: usize,
    d: usize,
}

impl Shape {
    pub(crate) fn new(n: usize, d: usize) -> Self {
        Shape { n, d }
    }

    fn len(&self) -> usize {
        self.n.pow(self.d as u32 + 1)
    }

    /// Stride of `axis`; axis 0 is the most significant.
    fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.d - axis) as u32)
    }

    pub(crate) fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.n + c)
    }

    pub(crate) fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.d + 1];
        for slot in coords.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
        coords
    }

    fn line_from_base(&self, axis: usize, base: usize) -> Vec<usize> {
        let stride = self.stride(axis);
        (0..self.n).map(|t| base + t * stride).collect()
    }

    pub(crate) fn lines(&self, axis: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len())
            .filter(move |&i| self.coords(i)[axis] == 0)
            .map(move |base| self.line_from_base(axis, base))
    }

    pub(crate) fn hyperplane_indices(&self, axis: usize, value: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.coords(i)[axis] == value)
            .collect()
    }
}

/// Dense array of side `n` with `d + 1` indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Array {
    n: usize,
    d: usize,
    entries: Vec<Rational>,
}

impl Array {
    pub fn zeros(n: usize, d: usize) -> Self {
        let len = cell_count(n, d).expect("array too large");
        Array {
            n,
            d,
            entries: vec![Rational::zero(); len],
        }
    }

    pub fn from_entries(n: usize, d: usize, entries: Vec<Rational>) -> Result<Self> {
        let len = cell_count(n, d)?;
        if entries.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {len} entries for n={n}, d={d}, got {}",
                entries.len()
            )));
        }
        Ok(Array { n, d, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub(crate) fn shape(&self) -> Shape {
        Shape::new(self.n, self.d)
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        assert_eq!(coords.len(), self.d + 1, "wrong number of coordinates");
        assert!(coords.iter().all(|&c| c < self.n), "coordinate out of range");
        self.shape().index(coords)
    }

    pub fn cell_of(&self, index: usize) -> Cell {
        Cell(self.shape().coords(index))
    }

    pub fn get(&self, coords: &[usize]) -> &Rational {
        &self.entries[self.index_of(coords)]
    }

    pub fn set(&mut self, coords: &[usize], value: Rational) {
        let idx = self.index_of(coords);
        self.entries[idx] = value;
    }

    pub fn get_index(&self, index: usize) -> &Rational {
        &self.entries[index]
    }

    pub fn set_index(&mut self, index: usize, value: Rational) {
        self.entries[index] = value;
    }

    /// Entries of the line varying along `axis`; `fixed` gives the other `d`
    /// coordinates in axis order.
    pub fn line(&self, axis: usize, fixed: &[usize]) -> Vec<&Rational> {
        assert!(axis <= self.d, "axis out of range");
        assert_eq!(fixed.len(), self.d, "a line fixes exactly d coordinates");
        let mut coords = Vec::with_capacity(self.d + 1);
        coords.extend_from_slice(&fixed[..axis]);
        coords.push(0);
        coords.extend_from_slice(&fixed[axis..]);
        let base = self.index_of(&coords);
        self.shape()
            .line_from_base(axis, base)
            .into_iter()
            .map(|i| &self.entries[i])
            .collect()
    }

    /// Entries of the coordinate hyperplane `x_axis = k`.
    pub fn hyperplane(&self, axis: usize, k: usize) -> Vec<&Rational> {
        assert!(axis <= self.d && k < self.n, "hyperplane out of range");
        self.shape()
            .hyperplane_indices(axis, k)
            .into_iter()
            .map(|i| &self.entries[i])
            .collect()
    }

    pub fn support(&self) -> Vec<Cell> {
        self.support_indices()
            .into_iter()
            .map(|i| self.cell_of(i))
            .collect()
    }

    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| !self.entries[i].is_zero())
            .collect()
    }

    pub fn is_zero_one(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero() || e.is_one())
    }

    pub fn check_spec(&self, spec: &PolytopeSpec) -> Result<()> {
        if self.n != spec.n || self.d != spec.d {
            return Err(Error::DimensionMismatch(format!(
                "array has n={}, d={} but spec has n={}, d={}",
                self.n, self.d, spec.n, spec.d
            )));
        }
        Ok(())
    }

    /// Nonnegative with every constraint set of `spec` summing to exactly one.
    pub fn is_member(&self, spec: &PolytopeSpec) -> Result<bool> {
        self.check_spec(spec)?;
        if self.entries.iter().any(|e| e.is_negative()) {
            return Ok(false);
        }
        let one = Rational::one();
        Ok(spec.constraint_groups().iter().all(|group| {
            group
                .iter()
                .fold(Rational::zero(), |acc, &i| acc + &self.entries[i])
                == one
        }))
    }

    /// `(self + other) / 2`.
    pub fn midpoint(&self, other: &Array) -> Array {
        assert_eq!((self.n, self.d), (other.n, other.d));
        let two = Rational::from_integer(2.into());
        Array {
            n: self.n,
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a + b) / &two)
                .collect(),
        }
    }

    /// `self + t * direction`.
    pub fn offset(&self, direction: &[Rational], t: &Rational) -> Array {
        assert_eq!(direction.len(), self.entries.len());
        Array {
            n: self.n,
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(direction)
                .map(|(a, v)| a + v * t)
                .collect(),
        }
    }

    /// Inner product with a coefficient vector of the same length.
    pub fn dot(&self, coefficients: &[Rational]) -> Rational {
        self.entries
            .iter()
            .zip(coefficients)
            .filter(|(a, _)| !a.is_zero())
            .fold(Rational::zero(), |acc, (a, c)| acc + a * c)
    }
}

/// 0/1 array with `A(i, j, k) = 1` iff `L(i, j) = k`.
pub fn latin_to_array(square: &LatinSquare) -> Result<Array> {
    square.validate()?;
    let n = square.order();
    let mut array = Array::zeros(n, 2);
    for i in 0..n {
        for j in 0..n {
            array.set(&[i, j, square.get(i, j)], Rational::one());
        }
    }
    Ok(array)
}

/// Inverse of [`latin_to_array`]; fails unless the array is a 0/1 member of `Omega` with `d = 2`.
pub fn array_to_latin(array: &Array) -> Result<LatinSquare> {
    if array.d() != 2 {
        return Err(Error::DimensionMismatch("Latin squares need d = 2".into()));
    }
    let n = array.n();
    if !array.is_zero_one() || !array.is_member(&PolytopeSpec::omega(n, 2))? {
        return Err(Error::NotLatin("array is not a 0/1 tristochastic array".into()));
    }
    let mut grid = vec![vec![0; n]; n];
    for cell in array.support() {
        let c = cell.coords();
        grid[c[0]][c[1]] = c[2];
    }
    LatinSquare::new(grid)
}
