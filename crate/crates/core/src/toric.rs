//! Fans, families of multifiltrations attached to them, Klyachko ray data,
//! classification of the corresponding equivariant sheaves, and pullback
//! along toric morphisms.
//!
//! Conventions: `N = Z^n` carries the fan; `M` is the dual lattice in dual
//! coordinates. Every cone `σ` gets the quotient `π_σ: M → M(σ) = M/(σ⊥ ∩ M)`
//! with the strict cone `π_σ(σ∨)`. For a ray `ρ` with primitive generator
//! `v_ρ` the quotient `M(ρ)` is identified with `Z` by `m ↦ ⟨m, v_ρ⟩`, so
//! `π_ρ(ρ∨)` is the nonnegative integers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactlin::{Rat, Subspace};
use crate::intlattice::dot_i64;
use crate::multifilt::{Comparison, EvalFiltration, Filtration, GradeOutcome, Multifiltration, RegularityWitness, Window};
use crate::oracle::materialize;
use crate::ordered_group::{Cone, LatticeMap, Point};

/// The quotient index data of one cone of a fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientIndex {
    /// `σ∨` in `M`.
    pub dual: Cone,
    /// `π_σ: M → M(σ)`.
    pub pi: LatticeMap,
    /// `π_σ(σ∨)`, strict and generating in `M(σ)`.
    pub cone: Cone,
}

/// One cone of a fan together with its combinatorics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanCone {
    pub cone: Cone,
    /// Indices into [`Fan::rays`].
    pub rays: Vec<usize>,
    pub quotient: QuotientIndex,
}

/// A fan in `N_R`, closed under faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    n_rank: usize,
    input: Vec<Vec<Point>>,
    rays: Vec<Point>,
    cones: Vec<FanCone>,
    /// Indices into `cones` of the maximal cones, in input order.
    max_cones: Vec<usize>,
}

fn extreme_rays(c: &Cone) -> Result<Vec<Point>> {
    Ok(Cone::from_facets(c.rank(), c.facets())?.generators().to_vec())
}

fn quotient_index(sigma: &Cone, rays: &[Point]) -> Result<QuotientIndex> {
    let dual = sigma.dual()?;
    if rays.len() == 1 && sigma.rank() > 0 {
        let pi = LatticeMap::new(sigma.rank(), 1, vec![rays[0].clone()])?;
        return Ok(QuotientIndex {
            dual,
            pi,
            cone: Cone::orthant(1),
        });
    }
    let qz = dual.quasi_zero_quotient()?;
    Ok(QuotientIndex {
        dual,
        pi: qz.q,
        cone: qz.quotient,
    })
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0u64..(1u64 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

impl Fan {
    /// Builds the fan whose maximal cones are spanned by the given rays.
    pub fn build(n_rank: usize, max_cones: &[Vec<Point>]) -> Result<Fan> {
        let mut maxes = Vec::new();
        for (k, gens) in max_cones.iter().enumerate() {
            let c = Cone::from_generators(n_rank, gens)?;
            if !c.is_strict() {
                return Err(Error::InvalidFan(format!("cone {k} is not strict")));
            }
            maxes.push(c);
        }
        for (k, a) in maxes.iter().enumerate() {
            for (l, b) in maxes.iter().enumerate().skip(k + 1) {
                let mut facets = a.facets().to_vec();
                facets.extend_from_slice(b.facets());
                let meet = Cone::from_facets(n_rank, &facets)?;
                if !a.has_face(&meet)? || !b.has_face(&meet)? {
                    return Err(Error::InvalidFan(format!(
                        "cones {k} and {l} do not meet along a common face"
                    )));
                }
            }
        }
        let mut rays: Vec<Point> = Vec::new();
        let mut faces: Vec<Cone> = Vec::new();
        for c in &maxes {
            let own = extreme_rays(c)?;
            for r in &own {
                if !rays.contains(r) {
                    rays.push(r.clone());
                }
            }
            for s in subsets(&own) {
                let f = Cone::from_generators(n_rank, &s)?;
                if c.has_face(&f)? && !faces.contains(&f) {
                    faces.push(f);
                }
            }
        }
        rays.sort();
        let mut cones = Vec::with_capacity(faces.len());
        for f in faces {
            let own = extreme_rays(&f)?;
            let idx: Vec<usize> = own
                .iter()
                .map(|r| rays.iter().position(|x| x == r).expect("ray of a face"))
                .collect();
            let quotient = quotient_index(&f, &own)?;
            cones.push(FanCone {
                cone: f,
                rays: idx,
                quotient,
            });
        }
        cones.sort_by_key(|c| (c.rays.len(), c.rays.clone()));
        let max_idx = maxes
            .iter()
            .map(|m| cones.iter().position(|c| &c.cone == m).expect("maximal cone listed"))
            .collect();
        Ok(Fan {
            n_rank,
            input: max_cones.to_vec(),
            rays,
            cones,
            max_cones: max_idx,
        })
    }

    pub fn n_rank(&self) -> usize {
        self.n_rank
    }

    /// The maximal cones as supplied.
    pub fn input(&self) -> &[Vec<Point>] {
        &self.input
    }

    pub fn rays(&self) -> &[Point] {
        &self.rays
    }

    pub fn cones(&self) -> &[FanCone] {
        &self.cones
    }

    pub fn max_cone_count(&self) -> usize {
        self.max_cones.len()
    }

    pub fn max_cone(&self, k: usize) -> &FanCone {
        &self.cones[self.max_cones[k]]
    }

    /// Index into [`Fan::cones`] of the `k`-th maximal cone.
    pub fn max_cone_index(&self, k: usize) -> usize {
        self.max_cones[k]
    }

    /// Indices of the cones that are faces of `cones()[i]`.
    pub fn faces_of(&self, i: usize) -> Vec<usize> {
        let own = &self.cones[i].rays;
        (0..self.cones.len())
            .filter(|&j| self.cones[j].rays.iter().all(|r| own.contains(r)))
            .collect()
    }

    /// `π_τσ: M(σ) → M(τ)` for a face `τ = cones()[face]` of `σ = cones()[cone]`.
    pub fn face_map(&self, face: usize, cone: usize) -> Result<LatticeMap> {
        let tau = &self.cones[face];
        let sigma = &self.cones[cone];
        if !tau.rays.iter().all(|r| sigma.rays.contains(r)) {
            return Err(Error::InvalidFan(format!("cone {face} is not a face of cone {cone}")));
        }
        tau.quotient.pi.compose(&sigma.quotient.pi.section()?)
    }

    /// The cone spanned by the common rays of two maximal cones.
    pub fn shared_face(&self, k: usize, l: usize) -> usize {
        let a = &self.max_cone(k).rays;
        let b = &self.max_cone(l).rays;
        let common: Vec<usize> = a.iter().copied().filter(|r| b.contains(r)).collect();
        self.cones
            .iter()
            .position(|c| {
                let mut x = c.rays.clone();
                x.sort();
                let mut y = common.clone();
                y.sort();
                x == y
            })
            .expect("fans are closed under faces")
    }
}

/// Per-maximal-cone multifiltrations over `(M(σ), π_σ(σ∨))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaFamily {
    e_dim: usize,
    cones: Vec<Multifiltration>,
}

/// Per-maximal-cone multifiltrations over `(M, σ∨)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaSystem {
    e_dim: usize,
    cones: Vec<Multifiltration>,
}

/// Two maximal cones inducing different filtrations on a shared face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceConflict {
    pub cones: (usize, usize),
    /// Rays spanning the shared face.
    pub face: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub compatible: bool,
    pub conflict: Option<FaceConflict>,
    pub exhaustive: bool,
    pub separated: bool,
}

/// Per-ray `Z`-indexed filtrations, each listed by its jumps: the value
/// `E_ρ(i)` is the space at the smallest jump level `≥ i` (zero above the
/// last jump).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KlyachkoData {
    pub e_dim: usize,
    pub rays: Vec<(Point, Vec<(i64, Subspace)>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocallyFreeReport {
    pub holds: bool,
    pub cone: Option<usize>,
    pub witness: Option<RegularityWitness>,
}

/// Classification flags. `reflexive` and `locally_free` are only decided
/// for torsion free data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub torsion_free: bool,
    pub reflexive: Option<bool>,
    pub locally_free: Option<bool>,
    pub report: FamilyReport,
    /// The failing cone and witness when the family is not locally free.
    pub regularity: Option<LocallyFreeReport>,
}

fn check_family_shape(fan: &Fan, e_dim: usize, cones: &[Multifiltration], dual: bool) -> Result<()> {
    if cones.len() != fan.max_cone_count() {
        return Err(Error::IncompatibleFamily(format!(
            "{} multifiltrations for {} maximal cones",
            cones.len(),
            fan.max_cone_count()
        )));
    }
    for (k, f) in cones.iter().enumerate() {
        let q = &fan.max_cone(k).quotient;
        let expected = if dual { &q.dual } else { &q.cone };
        if f.index() != expected {
            return Err(Error::IncompatibleFamily(format!(
                "multifiltration {k} is not indexed by the cone of maximal cone {k}"
            )));
        }
        if f.ambient_dim() != e_dim {
            return Err(Error::DimensionMismatch {
                expected: e_dim,
                found: f.ambient_dim(),
            });
        }
    }
    Ok(())
}

impl SigmaFamily {
    pub fn new(fan: &Fan, e_dim: usize, cones: Vec<Multifiltration>) -> Result<SigmaFamily> {
        check_family_shape(fan, e_dim, &cones, false)?;
        Ok(SigmaFamily { e_dim, cones })
    }

    /// The family of the trivial sheaf: `E` at the origin of every `M(σ)`.
    pub fn structure_sheaf(fan: &Fan, e_dim: usize) -> Result<SigmaFamily> {
        let cones = (0..fan.max_cone_count())
            .map(|k| {
                let c = fan.max_cone(k).quotient.cone.clone();
                let origin = vec![0; c.rank()];
                Multifiltration::trivial(c, e_dim, origin)
            })
            .collect::<Result<_>>()?;
        SigmaFamily::new(fan, e_dim, cones)
    }

    pub fn e_dim(&self) -> usize {
        self.e_dim
    }

    pub fn cones(&self) -> &[Multifiltration] {
        &self.cones
    }

    /// `F_τ = Ind_{π_τσ} F_σ` for a face `τ` of the `k`-th maximal cone.
    pub fn on_face(&self, fan: &Fan, k: usize, face: usize) -> Result<Multifiltration> {
        let map = fan.face_map(face, fan.max_cone_index(k))?;
        self.cones[k].ind(&map, &fan.cones()[face].quotient.cone)
    }
}

impl SigmaSystem {
    pub fn new(fan: &Fan, e_dim: usize, cones: Vec<Multifiltration>) -> Result<SigmaSystem> {
        check_family_shape(fan, e_dim, &cones, true)?;
        Ok(SigmaSystem { e_dim, cones })
    }

    pub fn cones(&self) -> &[Multifiltration] {
        &self.cones
    }
}

/// Checks compatibility on shared faces plus exhaustiveness and
/// separatedness of every maximal cone's filtration.
pub fn family_check(fan: &Fan, family: &SigmaFamily) -> Result<FamilyReport> {
    check_family_shape(fan, family.e_dim, &family.cones, false)?;
    let mut conflict = None;
    'outer: for k in 0..fan.max_cone_count() {
        for l in k + 1..fan.max_cone_count() {
            let face = fan.shared_face(k, l);
            let a = family.on_face(fan, k, face)?;
            let b = family.on_face(fan, l, face)?;
            if a.compare(&b)? != Comparison::Equal {
                conflict = Some(FaceConflict {
                    cones: (k, l),
                    face: fan.cones()[face].rays.iter().map(|&r| fan.rays()[r].clone()).collect(),
                });
                break 'outer;
            }
        }
    }
    let exhaustive = family.cones.iter().all(Multifiltration::is_exhaustive);
    let mut separated = true;
    for f in &family.cones {
        separated &= f.is_separated()?.holds;
    }
    Ok(FamilyReport {
        compatible: conflict.is_none(),
        conflict,
        exhaustive,
        separated,
    })
}

/// `Res^{π_σ}` on every maximal cone.
pub fn system_from_family(fan: &Fan, family: &SigmaFamily) -> Result<SigmaSystem> {
    let cones = family
        .cones
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let q = &fan.max_cone(k).quotient;
            f.res_surjective(&q.pi, &q.dual)
        })
        .collect::<Result<_>>()?;
    SigmaSystem::new(fan, family.e_dim, cones)
}

/// `Ind_{π_σ}` on every maximal cone.
pub fn family_from_system(fan: &Fan, system: &SigmaSystem) -> Result<SigmaFamily> {
    let cones = system
        .cones
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let q = &fan.max_cone(k).quotient;
            f.ind(&q.pi, &q.cone)
        })
        .collect::<Result<_>>()?;
    SigmaFamily::new(fan, system.e_dim, cones)
}

/// `m_τ`: the sum of the generators of `σ∨` orthogonal to the face `τ`, so
/// that `τ∨ = σ∨ + Z_{≥0}(−m_τ)`.
pub fn face_character(fan: &Fan, face: usize, cone: usize) -> Point {
    let tau = &fan.cones()[face].cone;
    let dual = &fan.cones()[cone].quotient.dual;
    let mut m = vec![0i64; fan.n_rank];
    for g in dual.generators() {
        if tau.generators().iter().all(|t| dot_i64(g, t) == 0) {
            m.iter_mut().zip(g).for_each(|(a, b)| *a += b);
        }
    }
    m
}

/// The stabilization index of the chain `m − i·m_τ` in a system filtration
/// over `(M, σ∨)`: the least `i ≥ 0` from which the values no longer change,
/// together with the stable value.
pub fn stabilization_index(system: &Multifiltration, m_tau: &[i64], m: &[i64]) -> Result<(u64, Subspace)> {
    let cone = system.index();
    let mut entries: Vec<(u64, &Subspace)> = Vec::new();
    for (p, s) in system.generators() {
        let diff: Vec<i64> = p.iter().zip(m).map(|(a, b)| a - b).collect();
        let mut need: Option<i128> = Some(0);
        for f in cone.facets() {
            let base = dot_i64(f, &diff);
            let step = dot_i64(f, m_tau);
            need = need.and_then(|n| {
                if base >= 0 {
                    Some(n)
                } else if step > 0 {
                    Some(n.max((-base + step - 1) / step))
                } else {
                    None
                }
            });
        }
        if let Some(i) = need {
            entries.push((u64::try_from(i).map_err(|_| Error::Overflow)?, s));
        }
    }
    let stable = Subspace::sum_all(system.ambient_dim(), entries.iter().map(|(_, s)| *s))?;
    entries.sort_by_key(|(i, _)| *i);
    let mut acc = Subspace::zero(system.ambient_dim());
    let mut index = 0;
    for (i, s) in &entries {
        if acc == stable {
            break;
        }
        acc = acc.sum(s)?;
        index = *i;
    }
    Ok((index, stable))
}

/// Ray filtrations `E_ρ = Ind_{π_ρσ} F_σ`, read off any maximal cone
/// containing the ray.
pub fn klyachko_from_family(fan: &Fan, family: &SigmaFamily) -> Result<KlyachkoData> {
    let mut rays = Vec::with_capacity(fan.rays().len());
    for (r, ray) in fan.rays().iter().enumerate() {
        let face = fan
            .cones()
            .iter()
            .position(|c| c.rays == [r])
            .expect("every ray is a face");
        let k = (0..fan.max_cone_count())
            .find(|&k| fan.max_cone(k).rays.contains(&r))
            .expect("every ray lies in a maximal cone");
        let on_ray = family.on_face(fan, k, face)?;
        let jumps = on_ray
            .jump_points()?
            .into_iter()
            .map(|(p, _)| Ok((p[0], on_ray.eval(&p)?)))
            .collect::<Result<Vec<_>>>()?;
        rays.push((ray.clone(), jumps));
    }
    Ok(KlyachkoData {
        e_dim: family.e_dim,
        rays,
    })
}

impl KlyachkoData {
    /// `E_ρ(i)` for the `r`-th ray.
    pub fn value(&self, r: usize, level: i64) -> Subspace {
        self.rays[r]
            .1
            .iter()
            .filter(|(z, _)| *z >= level)
            .min_by_key(|(z, _)| *z)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| Subspace::zero(self.e_dim))
    }

    fn ray_filtration(&self, r: usize) -> Result<Multifiltration> {
        Multifiltration::new(Cone::orthant(1), self.e_dim, self.rays[r].1.iter().map(|(z, s)| (vec![*z], s.clone())).collect())
    }
}

/// The hull `μ ↦ ⋂_{ρ ∈ σ(1)} E_ρ(⟨μ, v_ρ⟩)` on every maximal cone.
pub fn reflexive_hull(fan: &Fan, data: &KlyachkoData) -> Result<Vec<EvalFiltration>> {
    if data.rays.len() != fan.rays().len() {
        return Err(Error::IncompatibleFamily("ray data does not match the fan".into()));
    }
    (0..fan.max_cone_count())
        .map(|k| {
            let sigma = fan.max_cone(k);
            let parts = sigma
                .rays
                .iter()
                .map(|&r| {
                    let ray_face = fan.cones().iter().position(|c| c.rays == [r]).expect("ray face");
                    let map = fan.face_map(ray_face, fan.max_cone_index(k))?;
                    EvalFiltration::base(data.ray_filtration(r)?).res(&map, &sigma.quotient.cone, None)
                })
                .collect::<Result<Vec<_>>>()?;
            EvalFiltration::intersect_all(sigma.quotient.cone.clone(), data.e_dim, parts)
        })
        .collect()
}

fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect())
        .collect();
    let mut d = Rat::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[i][c] != Rat::from_integer(0.into())) else {
            return 0;
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c].clone();
        let pivot = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            let f = &row[c] / &pivot[c];
            row.iter_mut().zip(&pivot).for_each(|(x, y)| *x -= &f * y);
        }
    }
    i128::try_from(d.to_integer()).unwrap_or(i128::MAX)
}

/// A box in `M(σ)` containing every jump point of the reflexive hull on
/// the `k`-th maximal cone. The rays of `σ`, read as functionals on `M(σ)`,
/// span its dual; the box is the preimage of the level ranges under one
/// basis of rays, widened below by the largest ray determinant.
fn hull_box(fan: &Fan, data: &KlyachkoData, k: usize) -> Result<Window> {
    let sigma = fan.max_cone(k);
    let n = sigma.quotient.cone.rank();
    let section = sigma.quotient.pi.section()?;
    let rays: Vec<Point> = sigma
        .rays
        .iter()
        .map(|&r| section.dual().apply(&fan.rays()[r]))
        .collect::<Result<_>>()?;
    let bases: Vec<Vec<usize>> = subsets(&(0..rays.len()).collect::<Vec<_>>())
        .into_iter()
        .filter(|s| s.len() == n)
        .collect();
    let slack = bases
        .iter()
        .map(|b| det(&b.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>()).abs())
        .max()
        .unwrap_or(1)
        .max(1) as i64;
    let basis = bases
        .iter()
        .find(|b| det(&b.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>()) != 0)
        .expect("rays of a cone span its own lattice");
    let ranges: Vec<(i64, i64)> = basis
        .iter()
        .map(|&i| {
            let levels: Vec<i64> = data.rays[sigma.rays[i]].1.iter().map(|(z, _)| *z).collect();
            let lo = levels.iter().min().copied().unwrap_or(0);
            let hi = levels.iter().max().copied().unwrap_or(0);
            (lo - slack, hi)
        })
        .collect();
    // μ = V⁻¹ t with rows of V the basis rays; bound each coordinate over the box of t.
    let v: Vec<Vec<Rat>> = basis
        .iter()
        .map(|&i| rays[i].iter().map(|&x| Rat::from_integer(x.into())).collect())
        .collect();
    let inv = invert(&v);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for row in &inv {
        let (mut lo, mut hi) = (Rat::from_integer(0.into()), Rat::from_integer(0.into()));
        for (c, (a, b)) in row.iter().zip(&ranges) {
            let x = c * Rat::from_integer((*a).into());
            let y = c * Rat::from_integer((*b).into());
            if x < y {
                lo += x;
                hi += y;
            } else {
                lo += y;
                hi += x;
            }
        }
        lower.push(i64::try_from(lo.floor().to_integer()).map_err(|_| Error::Overflow)?);
        upper.push(i64::try_from(hi.ceil().to_integer()).map_err(|_| Error::Overflow)?);
    }
    Window::new(lower, upper)
}

fn invert(v: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = v.len();
    let zero = Rat::from_integer(0.into());
    let one = Rat::from_integer(1.into());
    let mut a: Vec<Vec<Rat>> = v
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| a[i][c] != zero).expect("invertible");
        a.swap(c, p);
        let inv = a[c][c].recip();
        a[c].iter_mut().for_each(|x| *x *= &inv);
        let pivot = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c && row[c] != zero {
                let f = row[c].clone();
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x -= &f * y);
            }
        }
    }
    // Columns of V⁻¹ act on t, and M coordinates are μ = (V⁻¹ t), so rows of
    // the right block are the coordinate functionals.
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// The reflexive hull of the family, materialized as a family.
pub fn reflexive_hull_family(fan: &Fan, data: &KlyachkoData) -> Result<SigmaFamily> {
    let hulls = reflexive_hull(fan, data)?;
    let cones = hulls
        .iter()
        .enumerate()
        .map(|(k, h)| {
            if h.index().rank() == 0 {
                let top = h.eval(&[])?;
                return Multifiltration::new(h.index().clone(), data.e_dim, vec![(vec![], top)]);
            }
            materialize(h as &dyn Filtration, &hull_box(fan, data, k)?)
        })
        .collect::<Result<_>>()?;
    SigmaFamily::new(fan, data.e_dim, cones)
}

/// Whether each `F_σ` equals the intersection of its ray filtrations.
pub fn is_reflexive(fan: &Fan, family: &SigmaFamily) -> Result<bool> {
    let data = klyachko_from_family(fan, family)?;
    let hull = reflexive_hull_family(fan, &data)?;
    for (f, h) in family.cones.iter().zip(&hull.cones) {
        if f.compare(h)? != Comparison::Equal {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Regularity of every maximal cone's filtration.
pub fn is_locally_free(family: &SigmaFamily) -> Result<LocallyFreeReport> {
    let outcomes: Vec<GradeOutcome> = family
        .cones
        .par_iter()
        .map(Multifiltration::grade)
        .collect::<Result<_>>()?;
    for (k, o) in outcomes.into_iter().enumerate() {
        if let GradeOutcome::NotRegular(w) = o {
            return Ok(LocallyFreeReport {
                holds: false,
                cone: Some(k),
                witness: Some(w),
            });
        }
    }
    Ok(LocallyFreeReport {
        holds: true,
        cone: None,
        witness: None,
    })
}

pub fn classify(fan: &Fan, family: &SigmaFamily) -> Result<Classification> {
    let report = family_check(fan, family)?;
    let torsion_free = report.compatible && report.exhaustive && report.separated;
    if !torsion_free {
        return Ok(Classification {
            torsion_free,
            reflexive: None,
            locally_free: None,
            report,
            regularity: None,
        });
    }
    let reflexive = is_reflexive(fan, family)?;
    let regularity = is_locally_free(family)?;
    let locally_free = regularity.holds;
    if locally_free && !reflexive {
        return Err(Error::IncompatibleFamily(
            "locally free family failed the reflexivity test".into(),
        ));
    }
    Ok(Classification {
        torsion_free,
        reflexive: Some(reflexive),
        locally_free: Some(locally_free),
        report,
        regularity: Some(regularity),
    })
}

/// `φ∨_σ: M'(σ') → M(σ)` induced by the dual of `φ: N → N'`.
pub fn dual_face_map(phi: &LatticeMap, fan: &Fan, k: usize, target: &Fan, k_prime: usize) -> Result<LatticeMap> {
    let sigma = fan.max_cone(k);
    let sigma_p = target.max_cone(k_prime);
    sigma
        .quotient
        .pi
        .compose(&phi.dual())?
        .compose(&sigma_p.quotient.pi.section()?)
}

/// Pulls a family back along `φ: N → N'`, with `F_σ = Ind_{φ∨_σ} F'_{σ'}`
/// for the first maximal `σ' ⊇ φ(σ)`.
pub fn pullback(phi: &LatticeMap, fan: &Fan, target: &Fan, family: &SigmaFamily) -> Result<SigmaFamily> {
    if phi.source_rank() != fan.n_rank || phi.target_rank() != target.n_rank {
        return Err(Error::RankMismatch {
            expected: fan.n_rank,
            found: phi.source_rank(),
        });
    }
    check_family_shape(target, family.e_dim, &family.cones, false)?;
    let mut cones = Vec::with_capacity(fan.max_cone_count());
    for k in 0..fan.max_cone_count() {
        let sigma = &fan.max_cone(k).cone;
        let images: Vec<Point> = sigma
            .generators()
            .iter()
            .map(|g| phi.apply(g))
            .collect::<Result<_>>()?;
        let k_prime = (0..target.max_cone_count())
            .find(|&kp| {
                let c = &target.max_cone(kp).cone;
                images.iter().all(|x| c.contains(x).unwrap_or(false))
            })
            .ok_or_else(|| {
                Error::InvalidFan(format!(
                    "no cone of the target fan contains the image of cone {k}"
                ))
            })?;
        let map = dual_face_map(phi, fan, k, target, k_prime)?;
        cones.push(family.cones[k_prime].ind(&map, &fan.max_cone(k).quotient.cone)?);
    }
    SigmaFamily::new(fan, family.e_dim, cones)
}
