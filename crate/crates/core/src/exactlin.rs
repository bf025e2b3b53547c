//! Exact rational linear algebra on subspaces of `Q^d`.
//!
//! Every [`Subspace`] is stored in reduced row-echelon form with leading
//! coefficient one, so two equal subspaces have identical fields and
//! `==` is value equality.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Rational vector.
pub type RatVec = Vec<Rat>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_vec(v: &[i64]) -> RatVec {
    v.iter().copied().map(rat).collect()
}

/// Formats a rational as `"p/q"`, omitting the denominator when it is one.
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Row-reduces `rows` in place and returns the pivot columns. Zero rows are
/// dropped; the result is the unique reduced row-echelon basis of the span.
fn rref_in_place(rows: &mut Vec<RatVec>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : row . x = 0 for every row}`.
pub fn nullspace(rows: &[RatVec], ncols: usize) -> Vec<RatVec> {
    let mut m = rows.to_vec();
    let pivots = rref_in_place(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Combination mode for [`Subspace::combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Sum,
    Intersect,
}

/// A subspace of `Q^ambient_dim` in canonical reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<RatVec>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .basis
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        write!(f, "Subspace(Q^{}: {:?})", self.ambient_dim, rows)
    }
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![Rat::zero(); ambient_dim];
                v[i] = Rat::one();
                v
            })
            .collect();
        Subspace {
            ambient_dim,
            basis,
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Canonical row space of `vectors`.
    pub fn from_vectors(ambient_dim: usize, vectors: &[RatVec]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: v.len(),
            });
        }
        Ok(Self::from_rows_unchecked(ambient_dim, vectors.to_vec()))
    }

    pub fn from_int_vectors(ambient_dim: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<RatVec> = vectors.iter().map(|v| rat_vec(v)).collect();
        Self::from_vectors(ambient_dim, &rows)
    }

    fn from_rows_unchecked(ambient_dim: usize, mut rows: Vec<RatVec>) -> Self {
        let pivots = rref_in_place(&mut rows, ambient_dim);
        Subspace {
            ambient_dim,
            basis: rows,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RatVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    fn check_same(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }

    pub fn combine(mode: Combine, s: &Subspace, t: &Subspace) -> Result<Subspace> {
        match mode {
            Combine::Sum => s.sum(t),
            Combine::Intersect => s.intersect(t),
        }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Self::from_rows_unchecked(self.ambient_dim, rows))
    }

    /// Sum of an arbitrary collection of subspaces of `Q^ambient_dim`.
    pub fn sum_all<'a, I>(ambient_dim: usize, spaces: I) -> Result<Subspace>
    where
        I: IntoIterator<Item = &'a Subspace>,
    {
        let mut rows = Vec::new();
        for s in spaces {
            if s.ambient_dim != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: s.ambient_dim,
                });
            }
            rows.extend(s.basis.iter().cloned());
        }
        Ok(Self::from_rows_unchecked(ambient_dim, rows))
    }

    /// The subspace of covectors vanishing on `self`, as a subspace of `Q^d`.
    pub fn annihilator(&self) -> Subspace {
        Self::from_rows_unchecked(self.ambient_dim, nullspace(&self.basis, self.ambient_dim))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        if self.is_zero() || other.is_full() {
            return Ok(self.clone());
        }
        if other.is_zero() || self.is_full() {
            return Ok(other.clone());
        }
        let mut eqs = nullspace(&self.basis, self.ambient_dim);
        eqs.extend(nullspace(&other.basis, self.ambient_dim));
        Ok(Self::from_rows_unchecked(
            self.ambient_dim,
            nullspace(&eqs, self.ambient_dim),
        ))
    }

    /// `v` with the pivot columns of `self` eliminated; zero iff `v` lies in `self`.
    pub fn reduce(&self, v: &[Rat]) -> RatVec {
        let mut out = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            if out[pc].is_zero() {
                continue;
            }
            let f = out[pc].clone();
            for (x, y) in out.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[Rat]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        Ok(self.reduce(v).iter().all(Zero::is_zero))
    }

    /// True iff `other` is a subspace of `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_same(other)?;
        if other.dim() > self.dim() {
            return Ok(false);
        }
        Ok(other
            .basis
            .iter()
            .all(|v| self.reduce(v).iter().all(Zero::is_zero)))
    }

    /// Coordinates of `v` (assumed to lie in `self`) in the echelon basis.
    pub fn coordinates(&self, v: &[Rat]) -> RatVec {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    /// Coordinates of the class of `v` in `Q^d / self`, read off the non-pivot
    /// columns after reduction. This is a surjection onto `Q^(d - dim)` whose
    /// kernel is exactly `self`.
    pub fn quotient_coordinates(&self, v: &[Rat]) -> RatVec {
        let r = self.reduce(v);
        (0..self.ambient_dim)
            .filter(|c| !self.pivots.contains(c))
            .map(|c| r[c].clone())
            .collect()
    }

    /// Image of `other` under [`Subspace::quotient_coordinates`].
    pub fn quotient_image(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        let rows = other
            .basis
            .iter()
            .map(|v| self.quotient_coordinates(v))
            .collect();
        Ok(Self::from_rows_unchecked(self.ambient_dim - self.dim(), rows))
    }

    /// `other ∩ self` written in the coordinates of [`Subspace::coordinates`].
    pub fn restrict(&self, other: &Subspace) -> Result<Subspace> {
        let meet = self.intersect(other)?;
        let rows = meet.basis.iter().map(|v| self.coordinates(v)).collect();
        Ok(Self::from_rows_unchecked(self.dim(), rows))
    }

    /// Number of independent directions shared with `other`.
    pub fn dot_rank(&self, other: &Subspace) -> Result<usize> {
        Ok(self.intersect(other)?.dim())
    }
}

/// Vectors completing a basis of `w` to a basis of `u`.
///
/// The rows of `u` are reduced modulo the pivots of `w` and the residue is
/// returned in reduced echelon form. The result therefore vanishes on the
/// pivot columns of `w`, meets `w` trivially, and depends only on the two
/// canonical inputs.
pub fn complement_basis(w: &Subspace, u: &Subspace) -> Result<Vec<RatVec>> {
    if !u.contains(w)? {
        return Err(Error::NotContained);
    }
    let residues: Vec<RatVec> = u.basis.iter().map(|v| w.reduce(v)).collect();
    let rest = Subspace::from_rows_unchecked(u.ambient_dim, residues);
    debug_assert_eq!(rest.dim() + w.dim(), u.dim());
    Ok(rest.basis)
}

/// Whether the given vectors are linearly independent.
pub fn independent(ambient_dim: usize, vectors: &[RatVec]) -> bool {
    Subspace::from_rows_unchecked(ambient_dim, vectors.to_vec()).dim() == vectors.len()
}

/// Scales a rational vector by a positive factor so that it becomes a
/// primitive integer vector. The zero vector maps to zeros.
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
