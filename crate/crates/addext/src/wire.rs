//! JSON wire formats for fields, codes, maps, monomial maps, and subspaces.
//!
//! Integer encodings follow the element encodings of the field module:
//! K-elements are base-`p` digit integers, L-elements base-`q` digit integers
//! of their K-coordinates. Field fragments carry `k_poly` as plain integers
//! and `l_poly` coefficients as little-endian digit arrays (bare integers are
//! accepted on input too).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::AdditiveCode;
use crate::field::{FieldTower, KElem, LElem};
use crate::isometry::{AdditiveMap, MonomialMap};
use crate::linalg::Subspace;
use crate::field::KLinearBijection;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn invalid<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> WireError + '_ {
    move |e| WireError::Invalid(format!("{context}: {e}"))
}

/// One `l_poly` coefficient: digit array, or a bare K-element integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KCoeffJson {
    Int(u64),
    Digits(Vec<u32>),
}

impl KCoeffJson {
    fn to_index(&self, p: u32) -> Result<u32, WireError> {
        match self {
            KCoeffJson::Int(v) => u32::try_from(*v)
                .map_err(|_| WireError::Invalid(format!("K-element {v} out of range"))),
            KCoeffJson::Digits(ds) => {
                let mut acc: u64 = 0;
                for &d in ds.iter().rev() {
                    if d >= p {
                        return Err(WireError::Invalid(format!(
                            "digit {d} not below p = {p}"
                        )));
                    }
                    acc = acc * u64::from(p) + u64::from(d);
                }
                u32::try_from(acc)
                    .map_err(|_| WireError::Invalid("K-element out of range".into()))
            }
        }
    }

    fn from_index(mut v: u32, p: u32) -> KCoeffJson {
        let mut digits = Vec::new();
        loop {
            digits.push(v % p);
            v /= p;
            if v == 0 {
                break;
            }
        }
        KCoeffJson::Digits(digits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u32,
    pub k_poly: Vec<u32>,
    pub l_poly: Vec<KCoeffJson>,
}

impl FieldJson {
    pub fn from_tower(t: &FieldTower) -> FieldJson {
        FieldJson {
            p: t.p(),
            k_poly: t.k().k_poly(),
            l_poly: t
                .l_poly()
                .into_iter()
                .map(|c| KCoeffJson::from_index(c, t.p()))
                .collect(),
        }
    }

    pub fn to_tower(&self) -> Result<FieldTower, WireError> {
        let l_poly: Vec<u32> = self
            .l_poly
            .iter()
            .map(|c| c.to_index(self.p))
            .collect::<Result<_, _>>()?;
        FieldTower::new(self.p, &self.k_poly, &l_poly).map_err(invalid("field"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub field: FieldJson,
    pub n: usize,
    pub generators: Vec<Vec<u64>>,
}

impl CodeJson {
    pub fn from_code(c: &AdditiveCode) -> CodeJson {
        CodeJson {
            field: FieldJson::from_tower(c.tower()),
            n: c.n(),
            generators: c
                .generators()
                .iter()
                .map(|row| row.iter().map(|e| u64::from(e.0)).collect())
                .collect(),
        }
    }

    pub fn to_code(&self) -> Result<AdditiveCode, WireError> {
        let tower = self.field.to_tower()?;
        let rows: Vec<Vec<LElem>> = self
            .generators
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&e| tower.elem(e).map_err(invalid("generator entry")))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        AdditiveCode::from_generators(&tower, self.n, &rows).map_err(invalid("code"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub code: CodeJson,
    pub images: Vec<Vec<u64>>,
}

impl MapJson {
    pub fn from_map(f: &AdditiveMap) -> MapJson {
        MapJson {
            code: CodeJson::from_code(f.domain()),
            images: f
                .images()
                .iter()
                .map(|row| row.iter().map(|e| u64::from(e.0)).collect())
                .collect(),
        }
    }

    pub fn to_map(&self) -> Result<AdditiveMap, WireError> {
        let code = self.code.to_code()?;
        let tower = code.tower().clone();
        let images: Vec<Vec<LElem>> = self
            .images
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&e| tower.elem(e).map_err(invalid("image entry")))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        AdditiveMap::from_images(&code, images).map_err(invalid("map"))
    }
}

/// `pi` is 0-based; each coordinate map is a row-major `m × m` matrix of
/// K-element integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub pi: Vec<usize>,
    pub coord_maps: Vec<Vec<u32>>,
}

impl MonomialJson {
    pub fn from_monomial(m: &MonomialMap) -> MonomialJson {
        MonomialJson {
            pi: m.pi().to_vec(),
            coord_maps: m
                .coord_maps()
                .iter()
                .map(|g| g.matrix().iter().map(|e| u32::from(e.0)).collect())
                .collect(),
        }
    }

    pub fn to_monomial(&self, tower: &FieldTower) -> Result<MonomialMap, WireError> {
        let coord_maps: Vec<KLinearBijection> = self
            .coord_maps
            .iter()
            .map(|mat| {
                let entries: Vec<KElem> = mat
                    .iter()
                    .map(|&e| {
                        tower
                            .k()
                            .elem(u64::from(e))
                            .map_err(invalid("coordinate-map entry"))
                    })
                    .collect::<Result<_, _>>()?;
                KLinearBijection::from_matrix(tower, entries).map_err(invalid("coordinate map"))
            })
            .collect::<Result<_, _>>()?;
        MonomialMap::new(self.pi.clone(), coord_maps).map_err(invalid("monomial map"))
    }
}

/// Canonical textual encoding of a subspace: its RREF basis rows as
/// K-element integers.
pub fn subspace_rows(s: &Subspace) -> Vec<Vec<u32>> {
    (0..s.dim())
        .map(|r| s.basis().row(r).iter().map(|e| u32::from(e.0)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    #[test]
    fn field_fragment_round_trip() {
        // canonical fragment shape: k_poly plain ints, l_poly digit arrays
        let json = r#"{"p":2,"k_poly":[0,1],"l_poly":[[1],[1],[1]]}"#;
        let fj: FieldJson = serde_json::from_str(json).unwrap();
        let t = fj.to_tower().unwrap();
        assert_eq!((t.q(), t.m()), (2, 2));
        let back = FieldJson::from_tower(&t);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);

        // bare integers accepted for l_poly coefficients
        let alt = r#"{"p":2,"k_poly":[0,1],"l_poly":[1,1,1]}"#;
        let fj2: FieldJson = serde_json::from_str(alt).unwrap();
        assert_eq!(fj2.to_tower().unwrap(), t);
    }

    #[test]
    fn digit_arrays_carry_multi_digit_elements() {
        // F_16 over F_4 with l_poly = y² + y + β, β = digits [0,1]
        let t = FieldTower::new(2, &[1, 1, 1], &[2, 1, 1]).unwrap();
        let fj = FieldJson::from_tower(&t);
        assert_eq!(
            serde_json::to_string(&fj).unwrap(),
            r#"{"p":2,"k_poly":[1,1,1],"l_poly":[[0,1],[1],[1]]}"#
        );
        assert_eq!(fj.to_tower().unwrap(), t);
    }

    #[test]
    fn code_and_map_round_trips() {
        let (code, map) = constructions::example1();
        let cj = CodeJson::from_code(&code);
        let parsed = cj.to_code().unwrap();
        assert!(parsed.same_span(&code));
        let mj = MapJson::from_map(&map);
        let s = serde_json::to_string(&mj).unwrap();
        let mj2: MapJson = serde_json::from_str(&s).unwrap();
        let f = mj2.to_map().unwrap();
        assert_eq!(f.images(), map.images());
    }

    mod properties {
        use super::*;
        use crate::code::reduce_generators;
        use crate::field::{FieldTower, LElem};
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn code_and_map_json_round_trip(
                raw in proptest::collection::vec(
                    proptest::collection::vec(0u32..4, 3),
                    1..4,
                ),
                raw_images in proptest::collection::vec(
                    proptest::collection::vec(0u32..4, 3),
                    3,
                ),
            ) {
                let t = FieldTower::with_defaults(2, 1, 2).unwrap();
                let rows: Vec<Vec<LElem>> =
                    raw.iter().map(|r| r.iter().map(|&e| LElem(e)).collect()).collect();
                let (basis, _) = reduce_generators(&t, 3, &rows).unwrap();
                prop_assume!(!basis.is_empty());
                let code = crate::code::AdditiveCode::from_generators(&t, 3, &basis).unwrap();
                let parsed = CodeJson::from_code(&code).to_code().unwrap();
                prop_assert!(parsed.same_span(&code));

                let images: Vec<Vec<LElem>> = raw_images[..code.k()]
                    .iter()
                    .map(|r| r.iter().map(|&e| LElem(e)).collect())
                    .collect();
                let map = crate::isometry::AdditiveMap::from_images(&code, images).unwrap();
                let back = MapJson::from_map(&map).to_map().unwrap();
                prop_assert_eq!(back.images(), map.images());
            }
        }
    }

    #[test]
    fn invalid_entries_are_rejected_with_context() {
        let json = r#"{"field":{"p":2,"k_poly":[0,1],"l_poly":[[1],[1],[1]]},"n":2,"generators":[[9,0]]}"#;
        let cj: CodeJson = serde_json::from_str(json).unwrap();
        let err = cj.to_code().unwrap_err();
        assert!(err.to_string().contains("generator entry"));
    }
}
