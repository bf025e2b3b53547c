//! Lattices `Z^r`, lattice maps, and saturated rational polyhedral cones.
//!
//! A [`Cone`] defines the preorder `a ≤ b ⟺ b − a ∈ C` on its lattice, so
//! a cone alone plays the role of a preordered group: its `rank` is the
//! lattice and its facets decide the order.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{Rat, Subspace};
use crate::intlattice::{
    big_dot, dot_i64, hermite_basis, integer_kernel, primitive, primitive_i64, smith_diagonal,
    to_big, to_small, BigVec,
};

/// A lattice point, equivalently an integer vector in fixed coordinates.
pub type Point = Vec<i64>;

/// An integer linear map `Z^source_rank → Z^target_rank`, stored as a
/// `target_rank × source_rank` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeMap {
    source_rank: usize,
    target_rank: usize,
    matrix: Vec<Vec<i64>>,
}

impl LatticeMap {
    pub fn new(source_rank: usize, target_rank: usize, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target_rank {
            return Err(Error::RankMismatch {
                expected: target_rank,
                found: matrix.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != source_rank) {
            return Err(Error::RankMismatch {
                expected: source_rank,
                found: row.len(),
            });
        }
        Ok(LatticeMap {
            source_rank,
            target_rank,
            matrix,
        })
    }

    pub fn identity(rank: usize) -> Self {
        let matrix = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        LatticeMap {
            source_rank: rank,
            target_rank: rank,
            matrix,
        }
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, p: &[i64]) -> Result<Point> {
        if p.len() != self.source_rank {
            return Err(Error::RankMismatch {
                expected: self.source_rank,
                found: p.len(),
            });
        }
        self.matrix
            .iter()
            .map(|row| i64::try_from(dot_i64(row, p)).map_err(|_| Error::Overflow))
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LatticeMap) -> Result<LatticeMap> {
        if inner.target_rank != self.source_rank {
            return Err(Error::RankMismatch {
                expected: self.source_rank,
                found: inner.target_rank,
            });
        }
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..inner.source_rank)
                    .map(|j| {
                        let s: i128 = row
                            .iter()
                            .zip(&inner.matrix)
                            .map(|(&a, r)| a as i128 * r[j] as i128)
                            .sum();
                        i64::try_from(s).map_err(|_| Error::Overflow)
                    })
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<_>>()?;
        LatticeMap::new(inner.source_rank, self.target_rank, matrix)
    }

    /// The dual map `Hom(Z^target, Z) → Hom(Z^source, Z)`.
    pub fn dual(&self) -> LatticeMap {
        let matrix = (0..self.source_rank)
            .map(|j| self.matrix.iter().map(|row| row[j]).collect())
            .collect();
        LatticeMap {
            source_rank: self.target_rank,
            target_rank: self.source_rank,
            matrix,
        }
    }

    fn big_rows(&self) -> Vec<BigVec> {
        self.matrix.iter().map(|r| to_big(r)).collect()
    }

    /// Invariant factors of the matrix.
    pub fn smith_diagonal(&self) -> Vec<BigInt> {
        smith_diagonal(&self.big_rows(), self.source_rank)
    }

    pub fn is_surjective(&self) -> bool {
        let d = self.smith_diagonal();
        d.len() == self.target_rank && d.iter().all(One::is_one)
    }

    /// Saturated basis of the kernel, in Hermite form.
    pub fn kernel(&self) -> Result<Vec<Point>> {
        integer_kernel(&self.big_rows(), self.source_rank)
            .iter()
            .map(|v| to_small(v))
            .collect()
    }

    /// Some lattice point mapping to `target`, if one exists.
    pub fn preimage(&self, target: &[i64]) -> Result<Option<Point>> {
        if target.len() != self.target_rank {
            return Err(Error::RankMismatch {
                expected: self.target_rank,
                found: target.len(),
            });
        }
        crate::intlattice::solve_integer(&self.big_rows(), self.source_rank, &to_big(target))
            .map(|x| to_small(&x))
            .transpose()
    }

    /// A map `s` with `self ∘ s = id`; exists exactly when `self` is surjective.
    pub fn section(&self) -> Result<LatticeMap> {
        let mut cols = Vec::with_capacity(self.target_rank);
        for i in 0..self.target_rank {
            let mut e = vec![0; self.target_rank];
            e[i] = 1;
            let x = self.preimage(&e)?.ok_or_else(|| {
                Error::RestrictionHypotheses("lattice map is not surjective".into())
            })?;
            cols.push(x);
        }
        let matrix = (0..self.source_rank)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        LatticeMap::new(self.target_rank, self.source_rank, matrix)
    }
}

/// Input side for [`Cone::close`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeInput {
    Generators(Vec<Point>),
    Facets(Vec<Point>),
}

/// A saturated rational polyhedral cone `C ⊆ Z^rank`, stored with both
/// descriptions.
///
/// `generators` are the supplied generators (primitive, deduplicated and
/// sorted) or, for a cone given by inequalities, its extreme rays together
/// with `±` a lineality basis. `facets` are canonical: the extreme rays of
/// the dual cone, each reduced modulo the dual lineality, plus `±` a Hermite
/// basis of that lineality. Equality compares the canonical data only.
#[derive(Clone)]
pub struct Cone {
    rank: usize,
    generators: Vec<Point>,
    facets: Vec<Point>,
    lineality: Vec<Point>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.facets == other.facets && self.lineality == other.lineality
    }
}

impl Eq for Cone {}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cone")
            .field("rank", &self.rank)
            .field("generators", &self.generators)
            .field("facets", &self.facets)
            .finish()
    }
}

/// Flags reported by [`Cone::flags`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeFlags {
    pub strict: bool,
    pub generating: bool,
    pub strongly_strict: bool,
}

/// Result of [`Cone::quasi_zero_quotient`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiZeroQuotient {
    pub q: LatticeMap,
    pub quotient: Cone,
}

/// Result of [`map_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapCheck {
    pub order_preserving: bool,
    pub surjective: bool,
    pub preimage_equals: bool,
}

fn check_len(rank: usize, vs: &[Point]) -> Result<()> {
    match vs.iter().find(|v| v.len() != rank) {
        Some(v) => Err(Error::RankMismatch {
            expected: rank,
            found: v.len(),
        }),
        None => Ok(()),
    }
}

fn normalize_vectors(vs: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = vs
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .map(|v| primitive_i64(v))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Generators of `{x ∈ Q^n : a·x ≥ 0 for all a in rows}` by the double
/// description method: returns `(extreme rays, lineality basis)`.
fn double_description(rows: &[BigVec], n: usize) -> (Vec<BigVec>, Vec<BigVec>) {
    let mut lin: Vec<BigVec> = (0..n)
        .map(|i| {
            let mut v = vec![BigInt::zero(); n];
            v[i] = BigInt::one();
            v
        })
        .collect();
    let mut rays: Vec<BigVec> = Vec::new();
    let mut seen: Vec<&BigVec> = Vec::new();
    for a in rows {
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        seen.push(a);
        if let Some(k) = lin.iter().position(|l| !big_dot(a, l).is_zero()) {
            let mut l0 = lin.remove(k);
            if big_dot(a, &l0).is_negative() {
                l0.iter_mut().for_each(|x| *x = -x.clone());
            }
            let al0 = big_dot(a, &l0);
            let adjust = |v: &BigVec| -> BigVec {
                let av = big_dot(a, v);
                let w: BigVec = v.iter().zip(&l0).map(|(x, y)| &al0 * x - &av * y).collect();
                primitive(&w)
            };
            lin = lin.iter().map(adjust).collect();
            rays = rays.iter().map(adjust).collect();
            rays.push(primitive(&l0));
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| big_dot(a, r)).collect();
        let zero_set = |r: &BigVec| -> Vec<bool> {
            seen.iter().map(|s| big_dot(s, r).is_zero()).collect()
        };
        let zsets: Vec<Vec<bool>> = rays.iter().map(zero_set).collect();
        let mut next: Vec<BigVec> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if !vals[i].is_negative() {
                next.push(r.clone());
            }
        }
        for (i, p) in rays.iter().enumerate() {
            if !vals[i].is_positive() {
                continue;
            }
            for (j, q) in rays.iter().enumerate() {
                if !vals[j].is_negative() {
                    continue;
                }
                let common: Vec<bool> = zsets[i].iter().zip(&zsets[j]).map(|(x, y)| *x && *y).collect();
                let adjacent = (0..rays.len()).filter(|&k| k != i && k != j).all(|k| {
                    !common
                        .iter()
                        .zip(&zsets[k])
                        .all(|(c, z)| !*c || *z)
                });
                if !adjacent {
                    continue;
                }
                let w: BigVec = q
                    .iter()
                    .zip(p)
                    .map(|(y, x)| &vals[i] * y - &vals[j] * x)
                    .collect();
                next.push(primitive(&w));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
    }
    (rays, lin)
}

/// Reduces each ray modulo the span of `lin` by orthogonal projection and
/// makes it primitive, then sorts and deduplicates.
fn canonical_rays(rays: &[BigVec], lin: &[BigVec], n: usize) -> Vec<BigVec> {
    let lin_space = Subspace::from_vectors(
        n,
        &lin.iter()
            .map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect::<Vec<_>>(),
    )
    .expect("lengths agree");
    let ortho = lin_space.annihilator();
    let mut out: Vec<BigVec> = rays
        .iter()
        .map(|r| {
            if lin.is_empty() {
                return r.clone();
            }
            // Project onto the orthogonal complement of lin: write r = l + o.
            let rv: Vec<Rat> = r.iter().map(|x| Rat::from_integer(x.clone())).collect();
            let proj = orthogonal_projection(&rv, ortho.basis());
            crate::exactlin::primitive_integer(&proj)
        })
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Orthogonal projection of `v` onto the span of `basis` (standard inner product).
fn orthogonal_projection(v: &[Rat], basis: &[Vec<Rat>]) -> Vec<Rat> {
    let k = basis.len();
    if k == 0 {
        return vec![Rat::zero(); v.len()];
    }
    // Solve the Gram system G c = (b_i · v).
    let dot = |a: &[Rat], b: &[Rat]| a.iter().zip(b).fold(Rat::zero(), |s, (x, y)| s + x * y);
    let mut aug: Vec<Vec<Rat>> = (0..k)
        .map(|i| {
            let mut row: Vec<Rat> = (0..k).map(|j| dot(&basis[i], &basis[j])).collect();
            row.push(dot(&basis[i], v));
            row
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !aug[i][c].is_zero()).expect("Gram matrix is invertible");
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        aug[c].iter_mut().for_each(|x| *x *= &inv);
        let prow = aug[c].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                row.iter_mut().zip(&prow).for_each(|(x, y)| *x -= &f * y);
            }
        }
    }
    let mut out = vec![Rat::zero(); v.len()];
    for (i, b) in basis.iter().enumerate() {
        let c = &aug[i][k];
        out.iter_mut().zip(b).for_each(|(o, x)| *o += c * x);
    }
    out
}

fn pm(basis: &[BigVec]) -> Vec<BigVec> {
    basis
        .iter()
        .flat_map(|v| [v.clone(), v.iter().map(|x| -x.clone()).collect()])
        .collect()
}

fn small_all(vs: &[BigVec]) -> Result<Vec<Point>> {
    vs.iter().map(|v| to_small(v)).collect()
}

impl Cone {
    /// The cone spanned by `generators` (saturated).
    pub fn from_generators(rank: usize, generators: &[Point]) -> Result<Cone> {
        check_len(rank, generators)?;
        let gens = normalize_vectors(generators);
        let big: Vec<BigVec> = gens.iter().map(|g| to_big(g)).collect();
        let (drays, dlin) = double_description(&big, rank);
        let dlin = hermite_basis(&dlin, rank);
        let mut facets = canonical_rays(&drays, &dlin, rank);
        facets.extend(pm(&dlin));
        facets.sort();
        facets.dedup();
        let lineality = integer_kernel(&facets, rank);
        Ok(Cone {
            rank,
            generators: gens,
            facets: small_all(&facets)?,
            lineality: small_all(&lineality)?,
        })
    }

    /// The cone `{x : ⟨f, x⟩ ≥ 0 for every f}`.
    pub fn from_facets(rank: usize, facets: &[Point]) -> Result<Cone> {
        check_len(rank, facets)?;
        let big: Vec<BigVec> = normalize_vectors(facets).iter().map(|f| to_big(f)).collect();
        let (rays, lin) = double_description(&big, rank);
        let lin = hermite_basis(&lin, rank);
        let mut gens = canonical_rays(&rays, &lin, rank);
        gens.extend(pm(&lin));
        Cone::from_generators(rank, &small_all(&gens)?)
    }

    pub fn close(rank: usize, input: &ConeInput) -> Result<Cone> {
        match input {
            ConeInput::Generators(g) => Cone::from_generators(rank, g),
            ConeInput::Facets(f) => Cone::from_facets(rank, f),
        }
    }

    /// The cone `{0}`.
    pub fn zero(rank: usize) -> Cone {
        Cone::from_generators(rank, &[]).expect("empty generator list")
    }

    /// The whole lattice, as a cone.
    pub fn full(rank: usize) -> Cone {
        Cone::from_facets(rank, &[]).expect("empty facet list")
    }

    /// The positive orthant `Z_{≥0}^rank`.
    pub fn orthant(rank: usize) -> Cone {
        let gens: Vec<Point> = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        Cone::from_generators(rank, &gens).expect("unit vectors")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn facets(&self) -> &[Point] {
        &self.facets
    }

    pub fn lineality(&self) -> &[Point] {
        &self.lineality
    }

    fn check_point(&self, p: &[i64]) -> Result<()> {
        if p.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: p.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[i64]) -> Result<bool> {
        self.check_point(x)?;
        Ok(self.facets.iter().all(|f| dot_i64(f, x) >= 0))
    }

    /// `a ≤ b` in the preorder defined by the cone.
    pub fn leq(&self, a: &[i64], b: &[i64]) -> Result<bool> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.leq_unchecked(a, b))
    }

    pub(crate) fn leq_unchecked(&self, a: &[i64], b: &[i64]) -> bool {
        self.facets.iter().all(|f| {
            f.iter()
                .zip(a.iter().zip(b))
                .map(|(&c, (&x, &y))| c as i128 * (y as i128 - x as i128))
                .sum::<i128>()
                >= 0
        })
    }

    /// `a < b`: `a ≤ b` and not `b ≤ a`.
    pub(crate) fn lt_unchecked(&self, a: &[i64], b: &[i64]) -> bool {
        self.leq_unchecked(a, b) && !self.leq_unchecked(b, a)
    }

    pub fn is_strict(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_generating(&self) -> bool {
        let rows: Vec<Vec<Rat>> = self
            .generators
            .iter()
            .map(|g| g.iter().map(|&x| Rat::from_integer(x.into())).collect())
            .collect();
        Subspace::from_vectors(self.rank, &rows)
            .expect("lengths agree")
            .dim()
            == self.rank
    }

    pub fn flags(&self) -> ConeFlags {
        let strict = self.is_strict();
        ConeFlags {
            strict,
            generating: self.is_generating(),
            strongly_strict: strict,
        }
    }

    /// The quotient by the quasi-zeros `C ∩ (−C)` with its induced strict cone.
    pub fn quasi_zero_quotient(&self) -> Result<QuasiZeroQuotient> {
        if self.is_strict() {
            return Ok(QuasiZeroQuotient {
                q: LatticeMap::identity(self.rank),
                quotient: self.clone(),
            });
        }
        let lin: Vec<BigVec> = self.lineality.iter().map(|v| to_big(v)).collect();
        let rows = hermite_basis(&integer_kernel(&lin, self.rank), self.rank);
        let q = LatticeMap::new(self.rank, rows.len(), small_all(&rows)?)?;
        let image: Vec<Point> = self
            .generators
            .iter()
            .map(|g| q.apply(g))
            .collect::<Result<_>>()?;
        let quotient = Cone::from_generators(q.target_rank(), &image)?;
        Ok(QuasiZeroQuotient { q, quotient })
    }

    /// The sum of the generators; lies in the interior when the cone is generating.
    pub fn ample_element(&self) -> Result<Point> {
        if !self.is_generating() {
            return Err(Error::NonGeneratingCone(
                "ample element requires a generating cone".into(),
            ));
        }
        let mut a = vec![0i64; self.rank];
        for g in &self.generators {
            for (x, y) in a.iter_mut().zip(g) {
                *x = x.checked_add(*y).ok_or(Error::Overflow)?;
            }
        }
        Ok(a)
    }

    /// A primitive covector positive on every nonzero element of a strict cone.
    pub fn separating_functional(&self) -> Result<Point> {
        if !self.is_strict() {
            return Err(Error::NonStrictCone);
        }
        let mut w = vec![0i64; self.rank];
        for f in &self.facets {
            for (x, y) in w.iter_mut().zip(f) {
                *x = x.checked_add(*y).ok_or(Error::Overflow)?;
            }
        }
        Ok(primitive_i64(&w))
    }

    /// Image of the cone under `phi`, saturated in the target lattice.
    pub fn image(&self, phi: &LatticeMap) -> Result<Cone> {
        if phi.source_rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: phi.source_rank(),
            });
        }
        let gens: Vec<Point> = self
            .generators
            .iter()
            .map(|g| phi.apply(g))
            .collect::<Result<_>>()?;
        Cone::from_generators(phi.target_rank(), &gens)
    }

    /// `phi⁻¹(self)` as a cone in the source lattice of `phi`.
    pub fn preimage(&self, phi: &LatticeMap) -> Result<Cone> {
        if phi.target_rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: phi.target_rank(),
            });
        }
        let pulled = phi.dual();
        let facets: Vec<Point> = self
            .facets
            .iter()
            .map(|f| pulled.apply(f))
            .collect::<Result<_>>()?;
        Cone::from_facets(phi.source_rank(), &facets)
    }

    /// The dual cone `{f : ⟨f, x⟩ ≥ 0 for x in C}` in the dual lattice.
    pub fn dual(&self) -> Result<Cone> {
        Cone::from_generators(self.rank, &self.facets)
    }

    /// Whether `face` is a face of `self` (both given as cones in the same lattice).
    pub fn has_face(&self, face: &Cone) -> Result<bool> {
        if face.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: face.rank,
            });
        }
        if !face.generators.iter().all(|g| self.leq_unchecked(&vec![0; self.rank], g)) {
            return Ok(false);
        }
        // A subcone is a face iff it equals C ∩ f⊥ for f = sum of the facets tight on it.
        let tight: Vec<&Point> = self
            .facets
            .iter()
            .filter(|f| face.generators.iter().all(|g| dot_i64(f, g) == 0))
            .collect();
        let mut facets: Vec<Point> = self.facets.clone();
        for f in tight {
            facets.push(f.iter().map(|x| -x).collect());
        }
        Ok(Cone::from_facets(self.rank, &facets)? == *face)
    }
}

/// Checks order preservation, surjectivity and `C = φ⁻¹(C')` for `phi: (source, c) → (target, c_prime)`.
pub fn map_check(phi: &LatticeMap, c: &Cone, c_prime: &Cone) -> Result<MapCheck> {
    if c.rank() != phi.source_rank() {
        return Err(Error::RankMismatch {
            expected: phi.source_rank(),
            found: c.rank(),
        });
    }
    if c_prime.rank() != phi.target_rank() {
        return Err(Error::RankMismatch {
            expected: phi.target_rank(),
            found: c_prime.rank(),
        });
    }
    let mut order_preserving = true;
    for g in c.generators() {
        if !c_prime.contains(&phi.apply(g)?)? {
            order_preserving = false;
            break;
        }
    }
    Ok(MapCheck {
        order_preserving,
        surjective: phi.is_surjective(),
        preimage_equals: c_prime.preimage(phi)? == *c,
    })
}
