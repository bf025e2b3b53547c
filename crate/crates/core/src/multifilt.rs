//! Finitely generated multifiltrations and their property checkers.
//!
//! A [`Multifiltration`] is given by finitely many pairs `(p, S_p)`; its value
//! at `λ` is `F^λ E = Σ_{p ≥ λ} S_p`. Every decreasing filtration that is
//! exhaustive and separated over a strict generating polyhedral cone has
//! finitely many jump points and is generated by them, so this
//! representation covers the filtrations the structure theorems speak about.
//! Filtrations that are only available pointwise (restrictions along
//! arbitrary maps, sub and quotient filtrations) are [`EvalFiltration`]s.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactlin::{complement_basis, independent, RatVec, Subspace};
use crate::ordered_group::{map_check, Cone, LatticeMap, Point};

/// Anything that can be evaluated pointwise as a decreasing filtration.
pub trait Filtration: Sync {
    fn index(&self) -> &Cone;
    fn ambient_dim(&self) -> usize;
    fn eval(&self, lambda: &[i64]) -> Result<Subspace>;
}

/// A finitely generated multifiltration.
///
/// Generators are kept merged (one entry per point), nonzero, and sorted by
/// point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multifiltration {
    index: Cone,
    ambient_dim: usize,
    gens: Vec<(Point, Subspace)>,
}

/// Outcome of [`Multifiltration::compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    FContainsG,
    GContainsF,
    Incomparable,
}

/// A boolean verdict with a human-readable justification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certified {
    pub holds: bool,
    pub certificate: String,
}

/// A direct sum decomposition `E = ⊕ E_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    ambient_dim: usize,
    pieces: Vec<(Point, Subspace)>,
}

/// Index sets `K1, K2` violating regularity: `lhs = F^{K1} ∩ F^{K2}`
/// strictly contains `rhs = F^{K̃1 ∩ K̃2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityWitness {
    pub k1: Vec<Point>,
    pub k2: Vec<Point>,
    pub lhs: Subspace,
    pub rhs: Subspace,
}

/// Result of [`Multifiltration::grade`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradeOutcome {
    Graded(Grading),
    NotRegular(RegularityWitness),
}

/// Result of [`Multifiltration::normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub q: LatticeMap,
    pub filtration: Multifiltration,
}

/// Axis-aligned box of lattice points `lower ≤ x ≤ upper` (componentwise).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Window {
    lower: Point,
    upper: Point,
}

impl Window {
    pub fn new(lower: Point, upper: Point) -> Result<Window> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidWindow(format!(
                "bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(a, b)| a > b) {
            return Err(Error::InvalidWindow(
                "lower bound exceeds upper bound".into(),
            ));
        }
        Ok(Window { lower, upper })
    }

    /// The cube `[lo, hi]^rank`.
    pub fn cube(rank: usize, lo: i64, hi: i64) -> Result<Window> {
        Window::new(vec![lo; rank], vec![hi; rank])
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn rank(&self) -> usize {
        self.lower.len()
    }

    pub fn len(&self) -> usize {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| (b - a + 1) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.rank()
            && p
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Grows the box by `pad` in every direction.
    pub fn padded(&self, pad: i64) -> Window {
        Window {
            lower: self.lower.iter().map(|x| x - pad).collect(),
            upper: self.upper.iter().map(|x| x + pad).collect(),
        }
    }

    /// All lattice points in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        let mut out = vec![self.lower.clone()];
        for axis in 0..self.rank() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (self.lower[axis]..=self.upper[axis]).map(move |v| {
                        let mut q = p.clone();
                        q[axis] = v;
                        q
                    })
                })
                .collect();
        }
        out.sort();
        out
    }
}

fn check_rank(expected: usize, p: &[i64]) -> Result<()> {
    if p.len() != expected {
        return Err(Error::RankMismatch {
            expected,
            found: p.len(),
        });
    }
    Ok(())
}

fn merge_gens(
    rank: usize,
    ambient_dim: usize,
    gens: Vec<(Point, Subspace)>,
) -> Result<Vec<(Point, Subspace)>> {
    let mut merged: BTreeMap<Point, Subspace> = BTreeMap::new();
    for (p, s) in gens {
        check_rank(rank, &p)?;
        if s.ambient_dim() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: s.ambient_dim(),
            });
        }
        if s.is_zero() {
            continue;
        }
        match merged.get_mut(&p) {
            Some(t) => *t = t.sum(&s)?,
            None => {
                merged.insert(p, s);
            }
        }
    }
    Ok(merged.into_iter().collect())
}

impl Filtration for Multifiltration {
    fn index(&self) -> &Cone {
        &self.index
    }

    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn eval(&self, lambda: &[i64]) -> Result<Subspace> {
        check_rank(self.index.rank(), lambda)?;
        Subspace::sum_all(
            self.ambient_dim,
            self.gens
                .iter()
                .filter(|(p, _)| self.index.leq_unchecked(lambda, p))
                .map(|(_, s)| s),
        )
    }
}

impl Grading {
    pub fn new(ambient_dim: usize, pieces: Vec<(Point, Subspace)>) -> Result<Grading> {
        let rank = pieces.first().map_or(0, |(p, _)| p.len());
        let merged = merge_gens(rank, ambient_dim, pieces)?;
        let total: usize = merged.iter().map(|(_, s)| s.dim()).sum();
        let span = Subspace::sum_all(ambient_dim, merged.iter().map(|(_, s)| s))?;
        if span.dim() != total {
            return Err(Error::InvalidGrading("pieces are not independent".into()));
        }
        if total != ambient_dim {
            return Err(Error::InvalidGrading(format!(
                "pieces span dimension {total}, ambient dimension is {ambient_dim}"
            )));
        }
        Ok(Grading {
            ambient_dim,
            pieces: merged,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn pieces(&self) -> &[(Point, Subspace)] {
        &self.pieces
    }
}

impl Multifiltration {
    pub fn new(index: Cone, ambient_dim: usize, gens: Vec<(Point, Subspace)>) -> Result<Self> {
        let gens = merge_gens(index.rank(), ambient_dim, gens)?;
        Ok(Multifiltration {
            index,
            ambient_dim,
            gens,
        })
    }

    /// The filtration with the single generator `E` at `p`.
    pub fn trivial(index: Cone, ambient_dim: usize, p: Point) -> Result<Self> {
        Multifiltration::new(index, ambient_dim, vec![(p, Subspace::full(ambient_dim))])
    }

    pub fn generators(&self) -> &[(Point, Subspace)] {
        &self.gens
    }

    pub fn index(&self) -> &Cone {
        &self.index
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn eval(&self, lambda: &[i64]) -> Result<Subspace> {
        Filtration::eval(self, lambda)
    }

    /// `F^K E = Σ_{λ ∈ K} F^λ E`.
    pub fn eval_set(&self, k: &[Point]) -> Result<Subspace> {
        for l in k {
            check_rank(self.index.rank(), l)?;
        }
        Subspace::sum_all(
            self.ambient_dim,
            self.gens
                .iter()
                .filter(|(p, _)| k.iter().any(|l| self.index.leq_unchecked(l, p)))
                .map(|(_, s)| s),
        )
    }

    /// Sum of generator spaces at points lying above some element of `k1`
    /// and some element of `k2`; this is `F^{K̃1 ∩ K̃2} E`.
    fn eval_joint_upset(&self, k1: &[Point], k2: &[Point]) -> Result<Subspace> {
        let c = &self.index;
        Subspace::sum_all(
            self.ambient_dim,
            self.gens
                .iter()
                .filter(|(p, _)| {
                    k1.iter().any(|l| c.leq_unchecked(l, p)) && k2.iter().any(|m| c.leq_unchecked(m, p))
                })
                .map(|(_, s)| s),
        )
    }

    /// Both sides of the regularity condition for one pair of index sets.
    pub fn check_pair(&self, k1: &[Point], k2: &[Point]) -> Result<RegularityWitness> {
        let lhs = self.eval_set(k1)?.intersect(&self.eval_set(k2)?)?;
        let rhs = self.eval_joint_upset(k1, k2)?;
        Ok(RegularityWitness {
            k1: k1.to_vec(),
            k2: k2.to_vec(),
            lhs,
            rhs,
        })
    }

    fn check_same_index(&self, other: &Multifiltration) -> Result<()> {
        if self.index != other.index {
            return Err(Error::IndexMismatch);
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }

    /// True iff `other ⊆ self` pointwise.
    pub fn contains(&self, other: &Multifiltration) -> Result<bool> {
        self.check_same_index(other)?;
        for (p, s) in &other.gens {
            if !self.eval(p)?.contains(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn compare(&self, other: &Multifiltration) -> Result<Comparison> {
        let fg = self.contains(other)?;
        let gf = other.contains(self)?;
        Ok(match (fg, gf) {
            (true, true) => Comparison::Equal,
            (true, false) => Comparison::FContainsG,
            (false, true) => Comparison::GContainsF,
            (false, false) => Comparison::Incomparable,
        })
    }

    /// `F[λ]`, with `F[λ]^μ = F^{λ+μ}`.
    pub fn shift(&self, lambda: &[i64]) -> Result<Multifiltration> {
        check_rank(self.index.rank(), lambda)?;
        let gens = self
            .gens
            .iter()
            .map(|(p, s)| {
                let q = p
                    .iter()
                    .zip(lambda)
                    .map(|(a, b)| a.checked_sub(*b).ok_or(Error::Overflow))
                    .collect::<Result<Point>>()?;
                Ok((q, s.clone()))
            })
            .collect::<Result<_>>()?;
        Multifiltration::new(self.index.clone(), self.ambient_dim, gens)
    }

    /// `Ind_φ F` over `(target, c_prime)`.
    pub fn ind(&self, phi: &LatticeMap, c_prime: &Cone) -> Result<Multifiltration> {
        if !map_check(phi, &self.index, c_prime)?.order_preserving {
            return Err(Error::NotOrderPreserving);
        }
        let gens = self
            .gens
            .iter()
            .map(|(p, s)| Ok((phi.apply(p)?, s.clone())))
            .collect::<Result<_>>()?;
        Multifiltration::new(c_prime.clone(), self.ambient_dim, gens)
    }

    /// `Res^φ F` over `(source, c)` for surjective `φ` with `c = φ⁻¹(C')`.
    pub fn res_surjective(&self, phi: &LatticeMap, c: &Cone) -> Result<Multifiltration> {
        let check = map_check(phi, c, &self.index)?;
        if !check.surjective {
            return Err(Error::RestrictionHypotheses(
                "lattice map is not surjective".into(),
            ));
        }
        if !check.preimage_equals {
            return Err(Error::RestrictionHypotheses(
                "source cone differs from the preimage of the target cone".into(),
            ));
        }
        let gens = self
            .gens
            .iter()
            .map(|(p, s)| {
                let p0 = phi.preimage(p)?.ok_or_else(|| {
                    Error::RestrictionHypotheses("generator point has no preimage".into())
                })?;
                Ok((p0, s.clone()))
            })
            .collect::<Result<_>>()?;
        Multifiltration::new(c.clone(), self.ambient_dim, gens)
    }

    /// Pushes the filtration to the quasi-zero quotient of its index cone.
    pub fn normalize(&self) -> Result<Normalized> {
        let qz = self.index.quasi_zero_quotient()?;
        let filtration = self.ind(&qz.q, &qz.quotient)?;
        Ok(Normalized {
            q: qz.q,
            filtration,
        })
    }

    fn require_strict(&self) -> Result<()> {
        if !self.index.is_strict() {
            return Err(Error::NonStrictCone);
        }
        Ok(())
    }

    /// Sum of the generator spaces at points strictly above `p`.
    fn strictly_above(&self, p: &[i64]) -> Result<Subspace> {
        Subspace::sum_all(
            self.ambient_dim,
            self.gens
                .iter()
                .filter(|(q, _)| self.index.lt_unchecked(p, q))
                .map(|(_, s)| s),
        )
    }

    /// Jump points with the dimension of the graded piece there.
    pub fn jump_points(&self) -> Result<Vec<(Point, usize)>> {
        self.require_strict()?;
        let mut out = Vec::new();
        for (p, _) in &self.gens {
            let at = self.eval(p)?;
            let above = self.strictly_above(p)?;
            if at.dim() > above.dim() {
                out.push((p.clone(), at.dim() - above.dim()));
            }
        }
        Ok(out)
    }

    pub fn is_exhaustive(&self) -> bool {
        Subspace::sum_all(self.ambient_dim, self.gens.iter().map(|(_, s)| s))
            .map(|s| s.is_full())
            .unwrap_or(false)
    }

    /// Chain-separatedness, certified by a separating functional bounded on
    /// the generator points (after passing to the quasi-zero quotient).
    pub fn is_chain_separated(&self) -> Result<Certified> {
        if self.gens.is_empty() {
            return Ok(Certified {
                holds: true,
                certificate: "all values are zero".into(),
            });
        }
        let n = self.normalize()?;
        let f = &n.filtration;
        let omega = f.index.separating_functional()?;
        let bound = f
            .gens
            .iter()
            .map(|(p, _)| crate::intlattice::dot_i64(&omega, p))
            .max()
            .unwrap_or(0);
        let via = if self.index.is_strict() {
            String::new()
        } else {
            " on the quasi-zero quotient".to_string()
        };
        Ok(Certified {
            holds: true,
            certificate: format!(
                "omega={omega:?} is positive on the cone and at most {bound} on every generator{via}; values vanish once omega exceeds the bound"
            ),
        })
    }

    /// Separatedness. Decided for generating index cones, and for graded
    /// filtrations over any strict cone: when `F^λ = ⊕_{μ ≥ λ} E_μ`, every
    /// `F^K` is the sum of the pieces indexed by the up-closure of `K`, so
    /// index sets with disjoint up-closures have independent values.
    pub fn is_separated(&self) -> Result<Certified> {
        if self.ambient_dim == 0 || self.gens.is_empty() {
            return Ok(Certified {
                holds: true,
                certificate: "all values are zero".into(),
            });
        }
        if !self.index.is_generating() {
            if self.index.is_strict() && self.is_exhaustive() {
                if let GradeOutcome::Graded(g) = self.grade()? {
                    return Ok(Certified {
                        holds: true,
                        certificate: format!(
                            "graded by {} pieces; values over disjoint up-sets are independent",
                            g.pieces.len()
                        ),
                    });
                }
            }
            return Err(Error::NonGeneratingCone(
                "separatedness undecided; cone not generating".into(),
            ));
        }
        let chain = self.is_chain_separated()?;
        let jumps = self.normalize()?.filtration.jump_points()?.len();
        Ok(Certified {
            holds: true,
            certificate: format!(
                "chain-separated ({}) with {jumps} jump points over a generating cone",
                chain.certificate
            ),
        })
    }

    /// Extracts a grading `E = ⊕ E_p` with `F^λ E = ⊕_{p ≥ λ} E_p`, or a
    /// witness that the filtration is not regular.
    pub fn grade(&self) -> Result<GradeOutcome> {
        self.require_strict()?;
        if self.ambient_dim == 0 {
            return Ok(GradeOutcome::Graded(Grading {
                ambient_dim: 0,
                pieces: Vec::new(),
            }));
        }
        if !self.is_exhaustive() {
            return Err(Error::NotExhaustive);
        }
        if let Some(g) = self.try_grading()? {
            return Ok(GradeOutcome::Graded(g));
        }
        match self.subset_pair_search(usize::MAX)? {
            Some(w) => Ok(GradeOutcome::NotRegular(w)),
            None => Err(Error::InvalidGrading(
                "section construction failed without a regularity violation".into(),
            )),
        }
    }

    fn try_grading(&self) -> Result<Option<Grading>> {
        let mut sections: Vec<(Point, Vec<RatVec>)> = Vec::new();
        for (p, _) in &self.gens {
            let at = self.eval(p)?;
            let above = self.strictly_above(p)?;
            let b = complement_basis(&above, &at)?;
            if !b.is_empty() {
                sections.push((p.clone(), b));
            }
        }
        let all: Vec<RatVec> = sections.iter().flat_map(|(_, b)| b.iter().cloned()).collect();
        if all.len() != self.ambient_dim || !independent(self.ambient_dim, &all) {
            return Ok(None);
        }
        for (r, _) in &self.gens {
            let expected: usize = sections
                .iter()
                .filter(|(p, _)| self.index.leq_unchecked(r, p))
                .map(|(_, b)| b.len())
                .sum();
            if self.eval(r)?.dim() != expected {
                return Ok(None);
            }
        }
        let pieces = sections
            .into_iter()
            .map(|(p, b)| Ok((p, Subspace::from_vectors(self.ambient_dim, &b)?)))
            .collect::<Result<_>>()?;
        Ok(Some(Grading {
            ambient_dim: self.ambient_dim,
            pieces,
        }))
    }

    pub fn is_regular(&self) -> Result<(bool, Option<RegularityWitness>)> {
        match self.grade()? {
            GradeOutcome::Graded(_) => Ok((true, None)),
            GradeOutcome::NotRegular(w) => Ok((false, Some(w))),
        }
    }

    /// Searches pairs of antichains of jump points for a regularity
    /// violation, smallest total size first. Returns `None` when every pair
    /// satisfies the regularity identity, which is equivalent to regularity.
    pub fn subset_pair_test(&self) -> Result<Option<RegularityWitness>> {
        self.require_strict()?;
        self.subset_pair_search(SUBSET_TEST_CAP)
    }

    fn subset_pair_search(&self, cap: usize) -> Result<Option<RegularityWitness>> {
        let jumps: Vec<Point> = self.jump_points()?.into_iter().map(|(p, _)| p).collect();
        if jumps.len() > cap {
            return Err(Error::CapExceeded {
                found: jumps.len(),
                cap,
            });
        }
        let c = &self.index;
        let comparable = |a: &Point, b: &Point| c.leq_unchecked(a, b) || c.leq_unchecked(b, a);
        let antichains = antichains(&jumps, comparable);
        let max_size = antichains.iter().map(Vec::len).max().unwrap_or(0);
        for total in 2..=2 * max_size {
            let pairs: Vec<(usize, usize)> = (0..antichains.len())
                .flat_map(|i| (i + 1..antichains.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| antichains[i].len() + antichains[j].len() == total)
                .collect();
            let found = pairs.par_iter().find_map_first(|&(i, j)| {
                let k1: Vec<Point> = antichains[i].iter().map(|&x| jumps[x].clone()).collect();
                let k2: Vec<Point> = antichains[j].iter().map(|&x| jumps[x].clone()).collect();
                match self.check_pair(&k1, &k2) {
                    Ok(w) if w.lhs != w.rhs => Some(Ok(w)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                }
            });
            if let Some(r) = found {
                return r.map(Some);
            }
        }
        Ok(None)
    }

    /// The filtration `F^λ E = ⊕_{μ ≥ λ} E_μ` defined by a grading.
    pub fn from_grading(grading: &Grading, index: &Cone) -> Result<Multifiltration> {
        Multifiltration::new(index.clone(), grading.ambient_dim, grading.pieces.clone())
    }

    pub fn sub_filtration(&self, s: &Subspace) -> Result<EvalFiltration> {
        EvalFiltration::base(self.clone()).sub_filtration(s)
    }

    pub fn quotient_filtration(&self, s: &Subspace) -> Result<EvalFiltration> {
        EvalFiltration::base(self.clone()).quotient(s)
    }

    /// The pointwise restriction `λ ↦ F^{φ(λ)}` along an order-preserving map.
    pub fn res_window(
        &self,
        phi: &LatticeMap,
        c: &Cone,
        window: Option<Window>,
    ) -> Result<EvalFiltration> {
        EvalFiltration::base(self.clone()).res(phi, c, window)
    }
}

/// Largest jump-point count accepted by [`Multifiltration::subset_pair_test`].
pub const SUBSET_TEST_CAP: usize = 14;

/// All nonempty antichains of `items`, as sorted index lists ordered by
/// size and then lexicographically.
pub(crate) fn antichains<T>(items: &[T], comparable: impl Fn(&T, &T) -> bool) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while !layer.is_empty() {
        out.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for a in &layer {
            let last = *a.last().expect("nonempty");
            for j in last + 1..n {
                if a.iter().all(|&i| !comparable(&items[i], &items[j])) {
                    let mut b = a.clone();
                    b.push(j);
                    next.push(b);
                }
            }
        }
        layer = next;
    }
    out
}

/// How an [`EvalFiltration`] computes its values.
#[derive(Debug, Clone)]
pub enum Construction {
    Base(Multifiltration),
    /// `λ ↦ S ∩ F^λ`, in the echelon coordinates of `S`.
    Sub { base: Box<EvalFiltration>, space: Subspace },
    /// `λ ↦ (F^λ + S)/S`, in the quotient coordinates of `S`.
    Quotient { base: Box<EvalFiltration>, space: Subspace },
    /// `λ ↦ F^{φ(λ)}`.
    Res { base: Box<EvalFiltration>, map: LatticeMap },
    /// `λ ↦ ⋂_i F_i^λ`.
    Intersect(Vec<EvalFiltration>),
}

/// A filtration known through an evaluator.
#[derive(Debug, Clone)]
pub struct EvalFiltration {
    index: Cone,
    ambient_dim: usize,
    construction: Construction,
    window: Option<Window>,
}

impl Filtration for EvalFiltration {
    fn index(&self) -> &Cone {
        &self.index
    }

    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn eval(&self, lambda: &[i64]) -> Result<Subspace> {
        check_rank(self.index.rank(), lambda)?;
        match &self.construction {
            Construction::Base(f) => f.eval(lambda),
            Construction::Sub { base, space } => space.restrict(&base.eval(lambda)?),
            Construction::Quotient { base, space } => space.quotient_image(&base.eval(lambda)?),
            Construction::Res { base, map } => base.eval(&map.apply(lambda)?),
            Construction::Intersect(parts) => {
                let mut acc = Subspace::full(self.ambient_dim);
                for p in parts {
                    acc = acc.intersect(&p.eval(lambda)?)?;
                    if acc.is_zero() {
                        break;
                    }
                }
                Ok(acc)
            }
        }
    }
}

impl EvalFiltration {
    pub fn base(f: Multifiltration) -> EvalFiltration {
        EvalFiltration {
            index: f.index.clone(),
            ambient_dim: f.ambient_dim,
            construction: Construction::Base(f),
            window: None,
        }
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// The window this evaluator is meant to be inspected on, if any.
    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub fn index(&self) -> &Cone {
        &self.index
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn eval(&self, lambda: &[i64]) -> Result<Subspace> {
        Filtration::eval(self, lambda)
    }

    pub fn sub_filtration(self, s: &Subspace) -> Result<EvalFiltration> {
        if s.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: s.ambient_dim(),
            });
        }
        Ok(EvalFiltration {
            index: self.index.clone(),
            ambient_dim: s.dim(),
            window: self.window.clone(),
            construction: Construction::Sub {
                base: Box::new(self),
                space: s.clone(),
            },
        })
    }

    pub fn quotient(self, s: &Subspace) -> Result<EvalFiltration> {
        if s.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: s.ambient_dim(),
            });
        }
        Ok(EvalFiltration {
            index: self.index.clone(),
            ambient_dim: self.ambient_dim - s.dim(),
            window: self.window.clone(),
            construction: Construction::Quotient {
                base: Box::new(self),
                space: s.clone(),
            },
        })
    }

    /// Restriction along an order-preserving `φ: (source, c) → (target, C')`.
    pub fn res(self, phi: &LatticeMap, c: &Cone, window: Option<Window>) -> Result<EvalFiltration> {
        if !map_check(phi, c, &self.index)?.order_preserving {
            return Err(Error::NotOrderPreserving);
        }
        if let Some(w) = &window {
            check_rank(c.rank(), w.lower())?;
        }
        Ok(EvalFiltration {
            index: c.clone(),
            ambient_dim: self.ambient_dim,
            window,
            construction: Construction::Res {
                base: Box::new(self),
                map: phi.clone(),
            },
        })
    }

    pub fn intersect_all(index: Cone, ambient_dim: usize, parts: Vec<EvalFiltration>) -> Result<EvalFiltration> {
        for p in &parts {
            if p.index != index {
                return Err(Error::IndexMismatch);
            }
            if p.ambient_dim != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: p.ambient_dim,
                });
            }
        }
        Ok(EvalFiltration {
            index,
            ambient_dim,
            construction: Construction::Intersect(parts),
            window: None,
        })
    }
}
