//! JSON documents for every value type. Rationals are strings `"p/q"`
//! (`"p"` when the denominator is one); subspaces are lists of basis rows.
//!
//! Each `*Doc` type mirrors one library value; `from_value`/`to_value`
//! convert in both directions and validate through the library
//! constructors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{format_rational, parse_rational, Subspace};
use crate::multifilt::{Grading, Multifiltration, RegularityWitness, Window};
use crate::ordered_group::{Cone, LatticeMap, Point};
use crate::solvable::WeightData;
use crate::toric::{Fan, KlyachkoData, SigmaFamily};

pub type SpaceDoc = Vec<Vec<String>>;

pub fn space_to_doc(s: &Subspace) -> SpaceDoc {
    s.basis()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect()
}

pub fn space_from_doc(d: usize, doc: &SpaceDoc) -> Result<Subspace> {
    let rows = doc
        .iter()
        .map(|row| {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            row.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Subspace::from_vectors(d, &rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDoc {
    pub lattice_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Point>>,
}

impl ConeDoc {
    pub fn to_value(c: &Cone) -> ConeDoc {
        ConeDoc {
            lattice_rank: c.rank(),
            generators: Some(c.generators().to_vec()),
            facets: Some(c.facets().to_vec()),
        }
    }

    pub fn from_value(&self) -> Result<Cone> {
        let r = self.lattice_rank;
        match (&self.generators, &self.facets) {
            (Some(g), None) => Cone::from_generators(r, g),
            (None, Some(f)) => Cone::from_facets(r, f),
            (Some(g), Some(f)) => {
                let c = Cone::from_generators(r, g)?;
                if c != Cone::from_facets(r, f)? {
                    return Err(Error::Parse("generators and facets describe different cones".into()));
                }
                Ok(c)
            }
            (None, None) => Err(Error::Parse("cone needs generators or facets".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub point: Point,
    pub space: SpaceDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultifiltrationDoc {
    pub index: ConeDoc,
    pub ambient_dim: usize,
    pub generators: Vec<GeneratorDoc>,
}

fn pairs_to_doc(pairs: &[(Point, Subspace)]) -> Vec<GeneratorDoc> {
    pairs
        .iter()
        .map(|(p, s)| GeneratorDoc {
            point: p.clone(),
            space: space_to_doc(s),
        })
        .collect()
}

fn pairs_from_doc(d: usize, docs: &[GeneratorDoc]) -> Result<Vec<(Point, Subspace)>> {
    docs.iter()
        .map(|g| Ok((g.point.clone(), space_from_doc(d, &g.space)?)))
        .collect()
}

impl MultifiltrationDoc {
    pub fn to_value(f: &Multifiltration) -> MultifiltrationDoc {
        MultifiltrationDoc {
            index: ConeDoc::to_value(f.index()),
            ambient_dim: f.ambient_dim(),
            generators: pairs_to_doc(f.generators()),
        }
    }

    pub fn from_value(&self) -> Result<Multifiltration> {
        Multifiltration::new(
            self.index.from_value()?,
            self.ambient_dim,
            pairs_from_doc(self.ambient_dim, &self.generators)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradingDoc {
    pub ambient_dim: usize,
    pub pieces: Vec<GeneratorDoc>,
}

impl GradingDoc {
    pub fn to_value(g: &Grading) -> GradingDoc {
        GradingDoc {
            ambient_dim: g.ambient_dim(),
            pieces: pairs_to_doc(g.pieces()),
        }
    }

    pub fn from_value(&self) -> Result<Grading> {
        Grading::new(self.ambient_dim, pairs_from_doc(self.ambient_dim, &self.pieces)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeMapDoc {
    pub source_rank: usize,
    pub target_rank: usize,
    pub matrix: Vec<Vec<i64>>,
}

impl LatticeMapDoc {
    pub fn to_value(m: &LatticeMap) -> LatticeMapDoc {
        LatticeMapDoc {
            source_rank: m.source_rank(),
            target_rank: m.target_rank(),
            matrix: m.matrix().to_vec(),
        }
    }

    pub fn from_value(&self) -> Result<LatticeMap> {
        LatticeMap::new(self.source_rank, self.target_rank, self.matrix.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDoc {
    pub lower: Point,
    pub upper: Point,
}

impl WindowDoc {
    pub fn to_value(w: &Window) -> WindowDoc {
        WindowDoc {
            lower: w.lower().to_vec(),
            upper: w.upper().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub k1: Vec<Point>,
    pub k2: Vec<Point>,
    pub lhs: SpaceDoc,
    pub rhs: SpaceDoc,
}

impl WitnessDoc {
    pub fn to_value(w: &RegularityWitness) -> WitnessDoc {
        WitnessDoc {
            k1: w.k1.clone(),
            k2: w.k2.clone(),
            lhs: space_to_doc(&w.lhs),
            rhs: space_to_doc(&w.rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDoc {
    #[serde(rename = "N_rank")]
    pub n_rank: usize,
    pub max_cones: Vec<Vec<Point>>,
}

impl FanDoc {
    pub fn to_value(f: &Fan) -> FanDoc {
        FanDoc {
            n_rank: f.n_rank(),
            max_cones: f.input().to_vec(),
        }
    }

    pub fn from_value(&self) -> Result<Fan> {
        Fan::build(self.n_rank, &self.max_cones)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntryDoc {
    pub cone_index: usize,
    pub multifiltration: MultifiltrationDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    #[serde(rename = "E_dim")]
    pub e_dim: usize,
    pub cones: Vec<FamilyEntryDoc>,
}

impl FamilyDoc {
    pub fn to_value(f: &SigmaFamily) -> FamilyDoc {
        FamilyDoc {
            e_dim: f.e_dim(),
            cones: f
                .cones()
                .iter()
                .enumerate()
                .map(|(i, m)| FamilyEntryDoc {
                    cone_index: i,
                    multifiltration: MultifiltrationDoc::to_value(m),
                })
                .collect(),
        }
    }

    pub fn from_value(&self, fan: &Fan) -> Result<SigmaFamily> {
        let mut slots: Vec<Option<Multifiltration>> = vec![None; fan.max_cone_count()];
        for entry in &self.cones {
            let slot = slots.get_mut(entry.cone_index).ok_or_else(|| {
                Error::IncompatibleFamily(format!("cone_index {} out of range", entry.cone_index))
            })?;
            if slot.is_some() {
                return Err(Error::IncompatibleFamily(format!(
                    "cone_index {} listed twice",
                    entry.cone_index
                )));
            }
            *slot = Some(entry.multifiltration.from_value()?);
        }
        let cones = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Error::IncompatibleFamily(format!("cone_index {i} missing"))))
            .collect::<Result<_>>()?;
        SigmaFamily::new(fan, self.e_dim, cones)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpDoc {
    pub level: i64,
    pub space: SpaceDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayDoc {
    pub ray: Point,
    pub jumps: Vec<JumpDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlyachkoDoc {
    pub rays: Vec<RayDoc>,
}

impl KlyachkoDoc {
    pub fn to_value(k: &KlyachkoData) -> KlyachkoDoc {
        KlyachkoDoc {
            rays: k
                .rays
                .iter()
                .map(|(ray, jumps)| RayDoc {
                    ray: ray.clone(),
                    jumps: jumps
                        .iter()
                        .map(|(level, s)| JumpDoc {
                            level: *level,
                            space: space_to_doc(s),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_value(&self, e_dim: usize) -> Result<KlyachkoData> {
        let rays = self
            .rays
            .iter()
            .map(|r| {
                let jumps = r
                    .jumps
                    .iter()
                    .map(|j| Ok((j.level, space_from_doc(e_dim, &j.space)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((r.ray.clone(), jumps))
            })
            .collect::<Result<_>>()?;
        Ok(KlyachkoData { e_dim, rays })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDataDoc {
    pub lattice_rank: usize,
    pub weights: Vec<Point>,
}

impl WeightDataDoc {
    pub fn to_value(w: &WeightData) -> WeightDataDoc {
        WeightDataDoc {
            lattice_rank: w.rank(),
            weights: w.weights().to_vec(),
        }
    }

    pub fn from_value(&self) -> Result<WeightData> {
        WeightData::new(self.lattice_rank, self.weights.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepPieceDoc {
    pub weight: Point,
    pub space: SpaceDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedRepDoc {
    #[serde(rename = "V_dim")]
    pub v_dim: usize,
    pub pieces: Vec<RepPieceDoc>,
}

impl GradedRepDoc {
    pub fn to_value(g: &Grading) -> GradedRepDoc {
        GradedRepDoc {
            v_dim: g.ambient_dim(),
            pieces: g
                .pieces()
                .iter()
                .map(|(p, s)| RepPieceDoc {
                    weight: p.clone(),
                    space: space_to_doc(s),
                })
                .collect(),
        }
    }

    pub fn from_value(&self) -> Result<Grading> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Ok((p.weight.clone(), space_from_doc(self.v_dim, &p.space)?)))
            .collect::<Result<_>>()?;
        Grading::new(self.v_dim, pieces)
    }
}
