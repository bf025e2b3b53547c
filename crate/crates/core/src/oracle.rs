//! Brute-force window oracles.
//!
//! These checks use nothing but pointwise evaluation, so they apply equally
//! to finitely generated filtrations and to evaluators, and they give an
//! independent route to the verdicts of the exact checkers. A "not regular"
//! verdict comes with a concrete pair of index sets and is conclusive. A
//! "regular" or "separated" verdict only says that no violation is visible
//! from the window.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactlin::Subspace;
use crate::intlattice::dot_i64;
use crate::multifilt::{antichains, Filtration, Multifiltration, RegularityWitness, Window};
use crate::ordered_group::{Cone, Point};

/// Property decided by [`oracle_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleProperty {
    Separated,
    Regular,
}

/// Limits for [`oracle_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Maximum number of candidate points (window jump points).
    pub cap: usize,
    /// Up to this many candidates every antichain is tried; above it only
    /// antichains with at most two points are.
    pub full_enumeration_limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cap: 60,
            full_enumeration_limit: 10,
        }
    }
}

/// Verdict of a window oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub property: OracleProperty,
    pub holds: bool,
    pub window: Window,
    /// The box over which values were sampled.
    pub sampled: Window,
    /// Jump points detected inside the window, with graded dimensions.
    pub jump_points: Vec<(Point, usize)>,
    pub witness: Option<RegularityWitness>,
}

/// Minimal generating set of the monoid `C ∩ Z^r` of a strict cone.
pub fn hilbert_basis(cone: &Cone) -> Result<Vec<Point>> {
    let omega = cone.separating_functional()?;
    let r = cone.rank();
    let mut bound = vec![0i64; r];
    for g in cone.generators() {
        for (b, x) in bound.iter_mut().zip(g) {
            *b += x.abs();
        }
    }
    let zonotope = Window::new(bound.iter().map(|b| -b).collect(), bound)?;
    let mut candidates: Vec<Point> = zonotope
        .points()
        .into_iter()
        .filter(|p| p.iter().any(|&x| x != 0) && cone.leq_unchecked(&vec![0; r], p))
        .collect();
    candidates.sort_by_key(|p| (dot_i64(&omega, p), p.clone()));
    let mut basis: Vec<Point> = Vec::new();
    for x in candidates {
        let reducible = basis.iter().any(|h| {
            let rest: Point = x.iter().zip(h).map(|(a, b)| a - b).collect();
            rest.iter().any(|&v| v != 0) && cone.leq_unchecked(&vec![0; r], &rest)
        });
        if !reducible {
            basis.push(x);
        }
    }
    basis.sort();
    Ok(basis)
}

/// Pointwise values of a filtration on a box, with a fallback for points
/// outside it.
struct Samples<'a> {
    f: &'a dyn Filtration,
    values: HashMap<Point, Subspace>,
}

impl<'a> Samples<'a> {
    fn new(f: &'a dyn Filtration, region: &Window) -> Result<Self> {
        let values = region
            .points()
            .into_par_iter()
            .map(|p| f.eval(&p).map(|v| (p, v)))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(Samples { f, values })
    }

    fn get(&self, p: &[i64]) -> Result<Subspace> {
        match self.values.get(p) {
            Some(v) => Ok(v.clone()),
            None => self.f.eval(p),
        }
    }

    /// `dim gr^λ = dim F^λ − dim Σ_{h} F^{λ+h}` over the Hilbert basis.
    fn graded_dim(&self, lambda: &[i64], hilbert: &[Point]) -> Result<usize> {
        let at = self.get(lambda)?;
        if at.is_zero() {
            return Ok(0);
        }
        let mut above = Subspace::zero(at.ambient_dim());
        for h in hilbert {
            let q: Point = lambda.iter().zip(h).map(|(a, b)| a + b).collect();
            above = above.sum(&self.get(&q)?)?;
            if above == at {
                return Ok(0);
            }
        }
        Ok(at.dim() - above.dim())
    }
}

fn check_window(f: &dyn Filtration, window: &Window) -> Result<()> {
    if window.rank() != f.index().rank() {
        return Err(Error::RankMismatch {
            expected: f.index().rank(),
            found: window.rank(),
        });
    }
    Ok(())
}

/// Jump points of `f` inside `region`, found by pointwise evaluation.
pub fn window_jump_points(f: &dyn Filtration, region: &Window) -> Result<Vec<(Point, usize)>> {
    check_window(f, region)?;
    if !f.index().is_strict() {
        return Err(Error::NonStrictCone);
    }
    let hilbert = hilbert_basis(f.index())?;
    let samples = Samples::new(f, region)?;
    jumps_in(&samples, region, &hilbert)
}

fn jumps_in(samples: &Samples<'_>, region: &Window, hilbert: &[Point]) -> Result<Vec<(Point, usize)>> {
    let found: Vec<Option<(Point, usize)>> = region
        .points()
        .into_par_iter()
        .map(|p| {
            let d = samples.graded_dim(&p, hilbert)?;
            Ok((d > 0).then_some((p, d)))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// The finitely generated filtration spanned by the values of `f` at its
/// jump points inside `region`. It agrees with `f` whenever `f` is
/// exhaustive and chain-separated and all of its jump points lie in `region`.
pub fn materialize(f: &dyn Filtration, region: &Window) -> Result<Multifiltration> {
    let jumps = window_jump_points(f, region)?;
    let gens = jumps
        .into_iter()
        .map(|(p, _)| {
            let v = f.eval(&p)?;
            Ok((p, v))
        })
        .collect::<Result<_>>()?;
    Multifiltration::new(f.index().clone(), f.ambient_dim(), gens)
}

/// The sampling box for a window: the window padded by the largest
/// generator coordinate of the cone times the window diameter.
pub fn sampling_box(cone: &Cone, window: &Window) -> Window {
    let spread = cone
        .generators()
        .iter()
        .flat_map(|g| g.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(0);
    let diameter = window
        .lower()
        .iter()
        .zip(window.upper())
        .map(|(a, b)| b - a)
        .max()
        .unwrap_or(0);
    window.padded(spread * diameter.max(1))
}

/// Checks separatedness or regularity of `f` literally on a window.
pub fn oracle_check(
    f: &dyn Filtration,
    window: &Window,
    property: OracleProperty,
    config: OracleConfig,
) -> Result<OracleReport> {
    check_window(f, window)?;
    if !f.index().is_strict() {
        return Err(Error::NonStrictCone);
    }
    let sampled = sampling_box(f.index(), window);
    let hilbert = hilbert_basis(f.index())?;
    let samples = Samples::new(f, &sampled)?;
    let jump_points = jumps_in(&samples, window, &hilbert)?;
    let mut report = OracleReport {
        property,
        holds: true,
        window: window.clone(),
        sampled: sampled.clone(),
        jump_points,
        witness: None,
    };
    if f.ambient_dim() == 0 {
        return Ok(report);
    }
    match property {
        OracleProperty::Separated => {
            report.holds = separated_on_window(f, &samples, window, &sampled)?;
        }
        OracleProperty::Regular => {
            report.witness = regular_on_window(f, &samples, &report.jump_points, &sampled, config)?;
            report.holds = report.witness.is_none();
        }
    }
    Ok(report)
}

/// Along the ample direction `a`, values starting in the window must die
/// out, and every nonzero value in the sampled box must sit below `N a`.
fn separated_on_window(
    f: &dyn Filtration,
    samples: &Samples<'_>,
    window: &Window,
    sampled: &Window,
) -> Result<bool> {
    let cone = f.index();
    if !cone.is_generating() {
        return Err(Error::NonGeneratingCone(
            "separatedness undecided; cone not generating".into(),
        ));
    }
    let a = cone.ample_element()?;
    let n = sampled
        .lower()
        .iter()
        .zip(sampled.upper())
        .map(|(lo, hi)| hi - lo + 1)
        .max()
        .unwrap_or(1);
    let top: Point = a.iter().map(|x| x * n).collect();
    for lambda in window.points() {
        let far: Point = lambda.iter().zip(&top).map(|(x, t)| x + t).collect();
        if !f.eval(&far)?.is_zero() {
            return Ok(false);
        }
    }
    for (p, v) in &samples.values {
        if !v.is_zero() && !cone.leq_unchecked(p, &top) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn regular_on_window(
    f: &dyn Filtration,
    samples: &Samples<'_>,
    jumps: &[(Point, usize)],
    sampled: &Window,
    config: OracleConfig,
) -> Result<Option<RegularityWitness>> {
    if jumps.len() > config.cap {
        return Err(Error::CapExceeded {
            found: jumps.len(),
            cap: config.cap,
        });
    }
    let cone = f.index();
    let points: Vec<Point> = jumps.iter().map(|(p, _)| p.clone()).collect();
    let comparable = |a: &Point, b: &Point| cone.leq_unchecked(a, b) || cone.leq_unchecked(b, a);
    let mut chains = antichains(&points, comparable);
    if points.len() > config.full_enumeration_limit {
        chains.retain(|c| c.len() <= 2);
    }

    // Distinct sampled values, so that sums over up-sets only touch each once.
    let box_points = sampled.points();
    let mut ids: BTreeMap<Subspace, usize> = BTreeMap::new();
    let mut value_of: Vec<usize> = Vec::with_capacity(box_points.len());
    let mut distinct: Vec<Subspace> = Vec::new();
    for p in &box_points {
        let v = samples.get(p)?;
        let next = ids.len();
        let id = *ids.entry(v.clone()).or_insert_with(|| {
            distinct.push(v);
            next
        });
        value_of.push(id);
    }

    struct Prepared {
        members: Vec<Point>,
        value: Subspace,
        upset: Vec<bool>,
    }
    let prepared: Vec<Prepared> = chains
        .par_iter()
        .map(|c| {
            let members: Vec<Point> = c.iter().map(|&i| points[i].clone()).collect();
            let mut value = Subspace::zero(f.ambient_dim());
            for m in &members {
                value = value.sum(&samples.get(m)?)?;
            }
            let upset = box_points
                .iter()
                .map(|q| members.iter().any(|m| cone.leq_unchecked(m, q)))
                .collect();
            Ok(Prepared {
                members,
                value,
                upset,
            })
        })
        .collect::<Result<_>>()?;

    let mut pairs: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|i| (i + 1..prepared.len()).map(move |j| (i, j)))
        .collect();
    pairs.sort_by_key(|&(i, j)| (prepared[i].members.len() + prepared[j].members.len(), i, j));

    let found = pairs.par_iter().find_map_first(|&(i, j)| {
        let (a, b) = (&prepared[i], &prepared[j]);
        let run = || -> Result<Option<RegularityWitness>> {
            let lhs = a.value.intersect(&b.value)?;
            if lhs.is_zero() {
                return Ok(None);
            }
            let joint: BTreeSet<usize> = (0..box_points.len())
                .filter(|&k| a.upset[k] && b.upset[k])
                .map(|k| value_of[k])
                .collect();
            let rhs = Subspace::sum_all(f.ambient_dim(), joint.iter().map(|&k| &distinct[k]))?;
            Ok((lhs != rhs).then(|| RegularityWitness {
                k1: a.members.clone(),
                k2: b.members.clone(),
                lhs,
                rhs,
            }))
        };
        run().transpose()
    });
    found.transpose()
}
