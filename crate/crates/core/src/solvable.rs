//! Index data attached to a connected solvable group through the weights of
//! its torus acting on the unipotent radical, and the multifiltration of a
//! representation graded by the same weights.

use crate::error::{Error, Result};
use crate::multifilt::{Grading, Multifiltration, Normalized};
use crate::ordered_group::{Cone, LatticeMap, Point};

/// The weights `R` in `M = Z^rank`; duplicates are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightData {
    rank: usize,
    weights: Vec<Point>,
}

impl WeightData {
    pub fn new(rank: usize, weights: Vec<Point>) -> Result<WeightData> {
        let mut weights = weights;
        for w in &weights {
            if w.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: w.len(),
                });
            }
        }
        weights.sort();
        weights.dedup();
        Ok(WeightData { rank, weights })
    }

    /// Positive roots of `SL_n` in simple-root coordinates: `e_i + … + e_{j-1}`
    /// for `i < j`.
    pub fn borel_sl(n: usize) -> Result<WeightData> {
        let r = n.saturating_sub(1);
        let mut weights = Vec::new();
        for i in 0..r {
            for j in i + 1..=r {
                let mut v = vec![0; r];
                v[i..j].iter_mut().for_each(|x| *x = 1);
                weights.push(v);
            }
        }
        WeightData::new(r, weights)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[Point] {
        &self.weights
    }
}

/// The inclusion of simple-root coordinates into the sum-zero sublattice of
/// `Z^n`, sending the `i`-th basis vector to `v_i = e_i − e_{i+1}`.
pub fn sl_root_embedding(n: usize) -> Result<LatticeMap> {
    let r = n.saturating_sub(1);
    let matrix = (0..n)
        .map(|row| {
            (0..r)
                .map(|col| match row as i64 - col as i64 {
                    0 => 1,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    LatticeMap::new(r, n, matrix)
}

/// The saturated cone generated by the weights.
pub fn weight_cone(w: &WeightData) -> Result<Cone> {
    Cone::from_generators(w.rank, &w.weights)
}

/// `F^m V = ⊕_{μ ≥ m} V_μ` over `(M, weight_cone(R))`.
pub fn rep_multifilt(w: &WeightData, v: &Grading) -> Result<Multifiltration> {
    if let Some((p, _)) = v.pieces().iter().find(|(p, _)| p.len() != w.rank) {
        return Err(Error::InvalidGrading(format!(
            "weight {p:?} does not lie in a lattice of rank {}",
            w.rank
        )));
    }
    Multifiltration::from_grading(v, &weight_cone(w)?)
}

/// The representation multifiltration pushed to the quotient by quasi-zeros.
pub fn rep_multifilt_normalized(w: &WeightData, v: &Grading) -> Result<Normalized> {
    rep_multifilt(w, v)?.normalize()
}
