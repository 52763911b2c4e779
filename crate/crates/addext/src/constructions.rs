//! Concrete code/map instances: the extendible showcase pair, the
//! unextendible counterexample family of length `q + 1`, evaluation (MDS)
//! codes, and K-expansions of L-linear codes.
//!
//! Element order is pinned by the integer encodings, so every instance is
//! reproducible bit for bit: the counterexample enumerates the elements of
//! `K` in encoding order and uses the first element of `L \ K` as its scalar.

use thiserror::Error;

use crate::code::{AdditiveCode, CodeError};
use crate::field::{FieldError, FieldTower, LElem};
use crate::isometry::{is_isometry_direct, AdditiveMap, IsometryError};
use crate::lmat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("no proper extension: the construction needs m ≥ 2")]
    NoProperExtension,
    #[error("evaluation points must be distinct")]
    DuplicatePoints,
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("rows are L-linearly dependent")]
    DependentRows,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
}

/// A constructed code, optionally with a distinguished map, under a stable
/// tag used by the command-line `make` subcommands.
#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub tag: String,
    pub code: AdditiveCode,
    pub map: Option<AdditiveMap>,
}

/// The showcase pair over `F_4 / F_2`: the additive (not `F_4`-linear) code
/// `⟨(1,1,0), (ω,0,1)⟩` with an additive isometry that does extend.
pub fn example1() -> (AdditiveCode, AdditiveMap) {
    let tower = FieldTower::with_defaults(2, 1, 2).expect("default F_4 tower");
    let w = LElem(2);
    let w2 = LElem(3);
    let one = LElem::ONE;
    let zero = LElem::ZERO;
    let code = AdditiveCode::from_generators(
        &tower,
        3,
        &[vec![one, one, zero], vec![w, zero, one]],
    )
    .expect("independent rows");
    let map = AdditiveMap::from_images(
        &code,
        vec![vec![zero, w2, w], vec![one, zero, one]],
    )
    .expect("well-shaped images");
    debug_assert!(is_isometry_direct(&map).unwrap());
    (code, map)
}

/// The unextendible family at length `n = q + 1`: generators
/// `(0,1,…,1)` and `(1,x_1,…,x_q)` with `x_i` running over `K` in encoding
/// order, mapped to `(0,1,…,1)` and `(0,ω,…,ω)` for the first `ω ∈ L \ K`.
/// The map is an isometry (all nonzero words on both sides have weight `q`)
/// but the image code has an identically-zero first coordinate while the
/// domain does not.
pub fn unextendible_pair(tower: &FieldTower) -> Result<(AdditiveCode, AdditiveMap), BuildError> {
    let omega = tower.first_outside_k().ok_or(BuildError::NoProperExtension)?;
    let q = tower.q() as usize;
    let n = q + 1;
    let one = LElem::ONE;
    let zero = LElem::ZERO;

    let mut v1 = vec![one; n];
    v1[0] = zero;
    let mut v2 = Vec::with_capacity(n);
    v2.push(one);
    for a in tower.k().elements() {
        v2.push(tower.embed_k(a));
    }
    let code = AdditiveCode::from_generators(tower, n, &[v1, v2])?;

    let mut u1 = vec![one; n];
    u1[0] = zero;
    let mut u2 = vec![omega; n];
    u2[0] = zero;
    let map = AdditiveMap::from_images(&code, vec![u1, u2])?;
    debug_assert!(is_isometry_direct(&map)?);
    Ok((code, map))
}

/// Evaluation code over `L` with distinct points, expanded to a K-basis
/// `{b_j · (x_1^t, …, x_n^t)}`. Always MDS with `d = n − k_L + 1`; verified
/// on construction.
pub fn rs_code(
    tower: &FieldTower,
    n: usize,
    k_l: usize,
    points: &[LElem],
) -> Result<AdditiveCode, BuildError> {
    if k_l == 0 || k_l > n {
        return Err(BuildError::BadDimensions(format!(
            "need 1 ≤ k_L ≤ n, got k_L = {k_l}, n = {n}"
        )));
    }
    if points.len() != n {
        return Err(BuildError::BadDimensions(format!(
            "{} evaluation points for length {n}",
            points.len()
        )));
    }
    let mut seen = vec![false; tower.order() as usize];
    for &p in points {
        tower.elem(u64::from(p.0))?;
        if seen[p.0 as usize] {
            return Err(BuildError::DuplicatePoints);
        }
        seen[p.0 as usize] = true;
    }
    let rows_l: Vec<Vec<LElem>> = (0..k_l)
        .map(|t| points.iter().map(|&x| tower.pow(x, t as u64)).collect())
        .collect();
    let code = expand_l_linear(tower, &rows_l)?;
    let profile = code.mds_profile()?;
    assert!(
        profile.is_mds && profile.d == n - k_l + 1,
        "evaluation code failed its Singleton check: {profile:?}"
    );
    Ok(code)
}

/// [`rs_code`] over the first `n` elements of `L` in encoding order.
pub fn rs_code_canonical(
    tower: &FieldTower,
    n: usize,
    k_l: usize,
) -> Result<AdditiveCode, BuildError> {
    if n as u64 > u64::from(tower.order()) {
        return Err(BuildError::BadDimensions(format!(
            "length {n} exceeds |L| = {}; distinct points are impossible",
            tower.order()
        )));
    }
    let points: Vec<LElem> = (0..n as u32).map(LElem).collect();
    rs_code(tower, n, k_l, &points)
}

/// K-expansion of an L-linear code: the K-basis `{b_j · row_t}` in j-major
/// order, so `k = m · k_L`.
pub fn expand_l_linear(
    tower: &FieldTower,
    rows_l: &[Vec<LElem>],
) -> Result<AdditiveCode, BuildError> {
    if rows_l.is_empty() {
        return Err(BuildError::BadDimensions(
            "at least one L-basis row is required".into(),
        ));
    }
    let n = rows_l[0].len();
    if rows_l.iter().any(|r| r.len() != n) {
        return Err(BuildError::BadDimensions(
            "ragged L-basis rows".into(),
        ));
    }
    if lmat::l_rank(tower, rows_l) != rows_l.len() {
        return Err(BuildError::DependentRows);
    }
    let mut gens = Vec::with_capacity(tower.m() * rows_l.len());
    for b in tower.basis() {
        for row in rows_l {
            gens.push(row.iter().map(|&e| tower.mul(b, e)).collect());
        }
    }
    Ok(AdditiveCode::from_generators(tower, n, &gens)?)
}

/// Instance registry for the CLI.
pub fn example1_instance() -> NamedInstance {
    let (code, map) = example1();
    NamedInstance {
        tag: "example1".into(),
        code,
        map: Some(map),
    }
}

pub fn counterexample_instance(tower: &FieldTower) -> Result<NamedInstance, BuildError> {
    let (code, map) = unextendible_pair(tower)?;
    Ok(NamedInstance {
        tag: "counterexample".into(),
        code,
        map: Some(map),
    })
}

pub fn rs_instance(tower: &FieldTower, n: usize, k_l: usize) -> Result<NamedInstance, BuildError> {
    Ok(NamedInstance {
        tag: "rs".into(),
        code: rs_code_canonical(tower, n, k_l)?,
        map: None,
    })
}
