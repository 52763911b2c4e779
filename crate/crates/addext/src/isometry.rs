//! K-linear maps on codes and the extendibility machinery.
//!
//! A weight-preserving K-linear map on a K-linear code extends to a
//! K-monomial map of the ambient space exactly when the column-space tuples
//! of the generator matrix and of the image matrix agree as multisets. The
//! analytic side of the same story is the weight profile: the integer-scaled
//! sum `Σ_i q^(k − dim V_i)·1_{V_i}` over `K^k`. Two tuples satisfy the
//! counting identity iff their profiles coincide pointwise, and a map is an
//! isometry iff the domain and image tuples do.
//!
//! Both decision routes are implemented here, plus the independent oracle:
//! a plain brute-force walk over all monomial candidates in a pinned order.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::code::{column_tuple_of_rows, weight, AdditiveCode, SpaceTuple};
use crate::exec::{self, Exec};
use crate::field::{enumerate_gl, gl_order, FieldError, FieldTower, KField, KLinearBijection, LElem};
use crate::linalg::{enumerate_subspaces, vec_index, LinalgError, Subspace};

/// Guard for profile tables and codeword enumerations.
pub const MAX_PROFILE: u128 = 1 << 24;
/// Guard on materialized tuple multisets in the nontrivial-solution search.
pub const MAX_TUPLE_MATERIALIZE: u128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsometryError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("field mismatch: images must live in the domain tower")]
    FieldMismatch,
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("map is not an isometry")]
    NotAnIsometry,
    #[error("budget exceeded: {needed} candidates over budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("tuples do not satisfy the counting identity")]
    CriterionFails,
    #[error("inequivalent tuples admit no proper covering witness")]
    NoCoveringWitness,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A K-linear map from a code into `L^n`, given by the images of the basis
/// rows. Any choice of images defines such a map.
#[derive(Clone, Debug)]
pub struct AdditiveMap {
    domain: AdditiveCode,
    images: Vec<Vec<LElem>>,
}

impl AdditiveMap {
    pub fn from_images(
        domain: &AdditiveCode,
        images: Vec<Vec<LElem>>,
    ) -> Result<AdditiveMap, IsometryError> {
        if images.len() != domain.k() {
            return Err(IsometryError::ShapeMismatch(format!(
                "{} image rows for a K-dimension of {}",
                images.len(),
                domain.k()
            )));
        }
        for row in &images {
            if row.len() != domain.n() {
                return Err(IsometryError::ShapeMismatch(format!(
                    "image row of length {} in a code of length {}",
                    row.len(),
                    domain.n()
                )));
            }
            for &e in row {
                if domain.tower().elem(u64::from(e.0)).is_err() {
                    return Err(IsometryError::FieldMismatch);
                }
            }
        }
        Ok(AdditiveMap {
            domain: domain.clone(),
            images,
        })
    }

    pub fn identity(domain: &AdditiveCode) -> AdditiveMap {
        AdditiveMap {
            domain: domain.clone(),
            images: domain.generators().to_vec(),
        }
    }

    pub fn domain(&self) -> &AdditiveCode {
        &self.domain
    }

    pub fn images(&self) -> &[Vec<LElem>] {
        &self.images
    }

    /// Image of the codeword with the given coefficient index, by K-linear
    /// extension from the basis images.
    pub fn image_word(&self, combo: u64) -> Vec<LElem> {
        let tower = self.domain.tower();
        let q = u64::from(tower.q());
        let n = self.domain.n();
        let mut word = vec![LElem::ZERO; n];
        let mut rem = combo;
        for row in &self.images {
            let a = crate::field::KElem((rem % q) as u16);
            rem /= q;
            if !a.is_zero() {
                for (w, &g) in word.iter_mut().zip(row) {
                    *w = tower.add(*w, tower.scalar_mul(a, g));
                }
            }
        }
        word
    }

    /// The image code: the K-span of the image rows (reduced if dependent).
    pub fn image_code(&self) -> Result<AdditiveCode, IsometryError> {
        let tower = self.domain.tower();
        let (basis, _drop) =
            crate::code::reduce_generators(tower, self.domain.n(), &self.images)
                .map_err(|e| IsometryError::ShapeMismatch(e.to_string()))?;
        if basis.is_empty() {
            // image is the zero code
            let m = tower.m();
            let z = Subspace::zero(self.domain.n() * m);
            return AdditiveCode::from_k_subspace(tower, self.domain.n(), &z)
                .map_err(|e| IsometryError::ShapeMismatch(e.to_string()));
        }
        AdditiveCode::from_generators(tower, self.domain.n(), &basis)
            .map_err(|e| IsometryError::ShapeMismatch(e.to_string()))
    }
}

fn enumeration_guard(code: &AdditiveCode) -> Result<u64, IsometryError> {
    let count = code.cardinality();
    if count > MAX_PROFILE {
        return Err(IsometryError::TooLarge(format!(
            "q^k = {count} codewords exceed {MAX_PROFILE}"
        )));
    }
    Ok(count as u64)
}

/// Direct isometry oracle: weight preservation on all `q^k` codewords.
pub fn is_isometry_direct(f: &AdditiveMap) -> Result<bool, IsometryError> {
    is_isometry_direct_exec(f, Exec::default())
}

pub fn is_isometry_direct_exec(f: &AdditiveMap, exec: Exec) -> Result<bool, IsometryError> {
    let count = enumeration_guard(f.domain())?;
    Ok(exec::range_all(exec, 0..count, |i| {
        weight(&f.domain().codeword(i)) == weight(&f.image_word(i))
    }))
}

/// The integer-rescaled counting table of a tuple of subspaces: at each
/// vector `x ∈ K^k` the value `Σ_i q^(k − dim V_i)·[x ∈ V_i]`. Exact integer
/// arithmetic throughout; the scale factor `q^k` clears all denominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    ambient: usize,
    values: Vec<u64>,
}

impl WeightProfile {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Value at the vector with the given little-endian base-`q` index.
    pub fn value_at(&self, index: u64) -> u64 {
        self.values[index as usize]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

pub fn weight_profile(k: &KField, tuple: &SpaceTuple) -> Result<WeightProfile, IsometryError> {
    let ambient = tuple.ambient();
    let q = u128::from(k.q());
    let size = q.pow(ambient as u32);
    if size > MAX_PROFILE {
        return Err(IsometryError::TooLarge(format!(
            "profile table of q^k = {size} entries exceeds {MAX_PROFILE}"
        )));
    }
    let mut values = vec![0u64; size as usize];
    for space in tuple.spaces() {
        let scale = u64::from(k.q()).pow((ambient - space.dim()) as u32);
        for v in space.enumerate_vectors(k)? {
            values[vec_index(k, &v) as usize] += scale;
        }
    }
    Ok(WeightProfile { ambient, values })
}

/// Pointwise equality of the two counting tables.
pub fn criterion_holds(
    k: &KField,
    v: &SpaceTuple,
    u: &SpaceTuple,
) -> Result<bool, IsometryError> {
    if v.ambient() != u.ambient() {
        return Err(IsometryError::AmbientMismatch(v.ambient(), u.ambient()));
    }
    Ok(weight_profile(k, v)? == weight_profile(k, u)?)
}

/// Multiset equality of two tuples (equal up to a coordinate permutation).
pub fn tuples_equivalent(v: &SpaceTuple, u: &SpaceTuple) -> Result<bool, IsometryError> {
    if v.ambient() != u.ambient() {
        return Err(IsometryError::AmbientMismatch(v.ambient(), u.ambient()));
    }
    if v.len() != u.len() {
        return Err(IsometryError::LengthMismatch(v.len(), u.len()));
    }
    Ok(v.sorted_spaces() == u.sorted_spaces())
}

/// Outcome of the tuple-based extendibility decision.
#[derive(Clone, Debug)]
pub struct ExtensionDecision {
    pub extends: bool,
    pub domain_tuple: SpaceTuple,
    pub image_tuple: SpaceTuple,
}

/// Decides whether the isometry `f` extends to a K-monomial map, by
/// comparing the column-space tuples of its domain and image matrices as
/// multisets. Non-isometries are rejected: the criterion presupposes weight
/// preservation, and the direct checker is the arbiter.
pub fn decide_extendible(f: &AdditiveMap) -> Result<ExtensionDecision, IsometryError> {
    if !is_isometry_direct(f)? {
        return Err(IsometryError::NotAnIsometry);
    }
    let domain_tuple = f.domain().column_tuple();
    let image_tuple =
        column_tuple_of_rows(f.domain().tower(), f.images(), f.domain().k(), f.domain().n());
    let extends = tuples_equivalent(&domain_tuple, &image_tuple)?;
    Ok(ExtensionDecision {
        extends,
        domain_tuple,
        image_tuple,
    })
}

// ---------------------------------------------------------------------------
// monomial maps and the brute-force oracle

/// A K-monomial map of `L^n`: output coordinate `i` is `g_i(v_{π(i)})`.
#[derive(Clone, Debug)]
pub struct MonomialMap {
    pi: Vec<usize>,
    coord_maps: Vec<KLinearBijection>,
}

impl MonomialMap {
    pub fn new(pi: Vec<usize>, coord_maps: Vec<KLinearBijection>) -> Result<MonomialMap, IsometryError> {
        let n = pi.len();
        if coord_maps.len() != n {
            return Err(IsometryError::ShapeMismatch(format!(
                "{} coordinate maps for length {n}",
                coord_maps.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in &pi {
            if p >= n || seen[p] {
                return Err(IsometryError::ShapeMismatch(
                    "pi is not a permutation".into(),
                ));
            }
            seen[p] = true;
        }
        Ok(MonomialMap { pi, coord_maps })
    }

    pub fn identity(tower: &FieldTower, n: usize) -> MonomialMap {
        MonomialMap {
            pi: (0..n).collect(),
            coord_maps: (0..n).map(|_| KLinearBijection::identity(tower)).collect(),
        }
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn coord_maps(&self) -> &[KLinearBijection] {
        &self.coord_maps
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn apply(&self, v: &[LElem]) -> Result<Vec<LElem>, IsometryError> {
        if v.len() != self.pi.len() {
            return Err(IsometryError::LengthMismatch(v.len(), self.pi.len()));
        }
        Ok((0..self.pi.len())
            .map(|i| self.coord_maps[i].apply(v[self.pi[i]]))
            .collect())
    }

    pub fn is_identity(&self) -> bool {
        self.pi.iter().enumerate().all(|(i, &p)| i == p)
            && self.coord_maps.iter().all(|g| g.is_identity())
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// The `idx`-th permutation of `0..n` in lexicographic order.
#[cfg(test)]
fn nth_permutation(n: usize, mut idx: u64) -> Vec<usize> {
    let mut available: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial(n - 1 - i) as u64;
        let d = (idx / f) as usize;
        idx %= f;
        out.push(available.remove(d));
    }
    out
}

/// Size of the full monomial candidate space `n!·|GL_m(K)|^n`.
pub fn monomial_candidate_count(tower: &FieldTower, n: usize) -> u128 {
    factorial(n).saturating_mul(gl_order(tower).saturating_pow(n as u32))
}

/// Exhaustive search for a K-monomial map restricting to `f` on the domain
/// basis (hence on the whole code, by linearity). Candidates are walked with
/// the permutation lexicographically major and the coordinate-map tuple in
/// enumeration order; the first hit is returned, so results are reproducible.
pub fn brute_force_extension(
    f: &AdditiveMap,
    budget: u64,
) -> Result<Option<MonomialMap>, IsometryError> {
    brute_force_extension_exec(f, budget, Exec::default())
}

pub fn brute_force_extension_exec(
    f: &AdditiveMap,
    budget: u64,
    exec: Exec,
) -> Result<Option<MonomialMap>, IsometryError> {
    let pool = enumerate_gl(f.domain().tower())?;
    brute_force_extension_with_pool(f, &pool, budget, exec)
}

/// Same search over an explicit pool of coordinate maps; used for the
/// field-automorphisms-only comparison mode.
///
/// The walk is factored: a candidate `(π, g_1, …, g_n)` restricts to `f`
/// iff every slot independently satisfies `g_i(A[r][π(i)]) = B[r][i]`, so
/// the lex-first hit is the lex-first permutation whose every slot admits a
/// valid coordinate map, with the pool-order-first map in each slot. The
/// result is identical to walking the flat candidate space in
/// permutation-major order (property-tested against that reference).
pub fn brute_force_extension_with_pool(
    f: &AdditiveMap,
    pool: &[KLinearBijection],
    budget: u64,
    exec: Exec,
) -> Result<Option<MonomialMap>, IsometryError> {
    let n = f.domain().n();
    let p = pool.len() as u128;
    let space = factorial(n).saturating_mul(p.saturating_pow(n as u32));
    if space > u128::from(budget) {
        return Err(IsometryError::BudgetExceeded {
            needed: space,
            budget,
        });
    }
    if n > MAX_MONOMIAL_LEN {
        return Err(IsometryError::TooLarge(format!(
            "monomial search supports length up to {MAX_MONOMIAL_LEN}"
        )));
    }
    let gens = f.domain().generators();
    let images = f.images();
    let k = f.domain().k();

    // first pool element mapping source column j onto image column i, per
    // (i, j); permutation feasibility is slot-independent
    let first_valid: Vec<Option<usize>> = (0..n * n)
        .map(|cell| {
            let (i, j) = (cell / n, cell % n);
            pool.iter()
                .position(|g| (0..k).all(|r| g.apply(gens[r][j]) == images[r][i]))
        })
        .collect();

    let n_fact = factorial(n) as u64;
    let scan_perm = |pidx: u64| -> Option<MonomialMap> {
        let mut perm = [0usize; MAX_MONOMIAL_LEN];
        decode_permutation(n, pidx, &mut perm);
        let mut choice = [0usize; MAX_MONOMIAL_LEN];
        for i in 0..n {
            choice[i] = first_valid[i * n + perm[i]]?;
        }
        let coord_maps = choice[..n].iter().map(|&g| pool[g].clone()).collect();
        Some(
            MonomialMap::new(perm[..n].to_vec(), coord_maps)
                .expect("decoded candidate is well-formed"),
        )
    };
    Ok(exec::range_find_map_first(exec, 0..n_fact, scan_perm))
}

pub(crate) const MAX_MONOMIAL_LEN: usize = 20;

const FACTORIALS: [u64; 21] = {
    let mut t = [1u64; 21];
    let mut i = 1;
    while i <= 20 {
        t[i] = t[i - 1] * i as u64;
        i += 1;
    }
    t
};

/// Writes the `idx`-th permutation of `0..n` (lexicographic) into `out`
/// without allocating.
fn decode_permutation(n: usize, mut idx: u64, out: &mut [usize]) {
    let mut avail = [0usize; MAX_MONOMIAL_LEN];
    for (i, a) in avail.iter_mut().enumerate().take(n) {
        *a = i;
    }
    let mut len = n;
    for i in 0..n {
        let f = FACTORIALS[n - 1 - i];
        let d = (idx / f) as usize;
        idx %= f;
        out[i] = avail[d];
        avail.copy_within(d + 1..len, d);
        len -= 1;
    }
}

// ---------------------------------------------------------------------------
// covering witnesses

/// Which tuple a covering witness lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleSide {
    Domain,
    Image,
}

/// An unmatched space covered by proper nonzero intersections with the
/// opposite tuple. `parts` are the opposite-tuple indices contributing, and
/// `t` counts the distinct nonzero parts.
#[derive(Clone, Debug)]
pub struct CoveringWitness {
    pub side: TupleSide,
    pub index: usize,
    pub parts: Vec<usize>,
    pub t: usize,
}

fn multiset_excess(own: &[Subspace], other: &[Subspace]) -> BTreeMap<Subspace, i64> {
    let mut counts: BTreeMap<Subspace, i64> = BTreeMap::new();
    for s in own {
        *counts.entry(s.clone()).or_insert(0) += 1;
    }
    for s in other {
        *counts.entry(s.clone()).or_insert(0) -= 1;
    }
    counts.retain(|_, c| *c > 0);
    counts
}

/// For a pair of tuples satisfying the counting identity but inequivalent as
/// multisets, finds an unmatched space `W` (in either tuple) that is covered
/// by its proper nonzero intersections with the opposite tuple. Returns
/// `None` when the tuples are equivalent.
pub fn covering_witness(
    k: &KField,
    v: &SpaceTuple,
    u: &SpaceTuple,
) -> Result<Option<CoveringWitness>, IsometryError> {
    if !criterion_holds(k, v, u)? {
        return Err(IsometryError::CriterionFails);
    }
    if tuples_equivalent(v, u)? {
        return Ok(None);
    }
    let excess_v = multiset_excess(v.spaces(), u.spaces());
    let excess_u = multiset_excess(u.spaces(), v.spaces());

    let mut candidates: Vec<(TupleSide, usize)> = Vec::new();
    for (i, s) in v.spaces().iter().enumerate() {
        if excess_v.contains_key(s) {
            candidates.push((TupleSide::Domain, i));
        }
    }
    for (i, s) in u.spaces().iter().enumerate() {
        if excess_u.contains_key(s) {
            candidates.push((TupleSide::Image, i));
        }
    }
    let space_of = |side: TupleSide, i: usize| -> &Subspace {
        match side {
            TupleSide::Domain => &v.spaces()[i],
            TupleSide::Image => &u.spaces()[i],
        }
    };
    candidates.sort_by(|&(sa, ia), &(sb, ib)| {
        let da = space_of(sa, ia).dim();
        let db = space_of(sb, ib).dim();
        db.cmp(&da)
            .then_with(|| matches!(sa, TupleSide::Image).cmp(&matches!(sb, TupleSide::Image)))
            .then(ia.cmp(&ib))
    });

    for (side, idx) in candidates {
        let w = space_of(side, idx);
        if w.dim() == 0 {
            continue;
        }
        let opposite = match side {
            TupleSide::Domain => u.spaces(),
            TupleSide::Image => v.spaces(),
        };
        let mut part_indices = Vec::new();
        let mut parts = Vec::new();
        for (i, x) in opposite.iter().enumerate() {
            let inter = w.intersect(k, x)?;
            if inter.dim() > 0 && inter.dim() < w.dim() {
                part_indices.push(i);
                parts.push(inter);
            }
        }
        if parts.is_empty() {
            continue;
        }
        let covered = w.enumerate_vectors(k)?.into_iter().all(|vec| {
            vec.iter().all(|e| e.is_zero())
                || parts.iter().any(|p| p.contains(k, &vec).unwrap_or(false))
        });
        if covered {
            let mut distinct = parts.clone();
            distinct.sort();
            distinct.dedup();
            return Ok(Some(CoveringWitness {
                side,
                index: idx,
                parts: part_indices,
                t: distinct.len(),
            }));
        }
    }
    Err(IsometryError::NoCoveringWitness)
}

// ---------------------------------------------------------------------------
// nontrivial solutions of the counting identity

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut result: u128 = 1;
    for i in 1..=k {
        result = match result.checked_mul(n - k + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    result
}

/// All pairs of length-`n` tuples over the subspaces of `K^k` (dimensions up
/// to `dim_bound`, default `k`) that share a weight profile without being
/// equal as multisets. Tuples are canonicalized as sorted multisets, so the
/// output is free of reordering duplicates; pairs are emitted grouped by
/// profile, in deterministic order.
pub fn search_nontrivial_solutions(
    k: &KField,
    ambient: usize,
    n: usize,
    dim_bound: Option<usize>,
    budget: u64,
) -> Result<Vec<(SpaceTuple, SpaceTuple)>, IsometryError> {
    let bound = dim_bound.unwrap_or(ambient).min(ambient);
    let dims: Vec<usize> = (0..=bound).collect();
    let alphabet = enumerate_subspaces(k, ambient, Some(&dims))?;
    let s = alphabet.len() as u128;
    let multisets = binomial(s + n as u128 - 1, n as u128);
    if multisets > u128::from(budget) {
        return Err(IsometryError::BudgetExceeded {
            needed: multisets,
            budget,
        });
    }
    if multisets > MAX_TUPLE_MATERIALIZE {
        return Err(IsometryError::TooLarge(format!(
            "{multisets} tuple multisets exceed {MAX_TUPLE_MATERIALIZE}"
        )));
    }
    let q = u128::from(k.q());
    let size = q.pow(ambient as u32);
    if size > MAX_PROFILE {
        return Err(IsometryError::TooLarge(format!(
            "profile tables of {size} entries exceed {MAX_PROFILE}"
        )));
    }
    // per-letter profile contribution
    let mut letter_profiles: Vec<Vec<u64>> = Vec::with_capacity(alphabet.len());
    for space in &alphabet {
        let scale = u64::from(k.q()).pow((ambient - space.dim()) as u32);
        let mut vals = vec![0u64; size as usize];
        for v in space.enumerate_vectors(k)? {
            vals[vec_index(k, &v) as usize] += scale;
        }
        letter_profiles.push(vals);
    }

    // nondecreasing index vectors = sorted multisets
    let mut multiset_list: Vec<Vec<usize>> = Vec::with_capacity(multisets as usize);
    let mut current = vec![0usize; n];
    fn rec(
        alphabet_len: usize,
        slot: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if slot == current.len() {
            out.push(current.clone());
            return;
        }
        for i in start..alphabet_len {
            current[slot] = i;
            rec(alphabet_len, slot + 1, i, current, out);
        }
    }
    if n > 0 {
        rec(alphabet.len(), 0, 0, &mut current, &mut multiset_list);
    }

    let mut buckets: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    for (mi, ms) in multiset_list.iter().enumerate() {
        let mut profile = vec![0u64; size as usize];
        for &letter in ms {
            for (p, c) in profile.iter_mut().zip(&letter_profiles[letter]) {
                *p += c;
            }
        }
        buckets.entry(profile).or_default().push(mi);
    }

    let mut out = Vec::new();
    for members in buckets.values() {
        for (a, &ma) in members.iter().enumerate() {
            for &mb in &members[a + 1..] {
                let ta = SpaceTuple::new(
                    ambient,
                    multiset_list[ma].iter().map(|&i| alphabet[i].clone()).collect(),
                )
                .expect("uniform ambient");
                let tb = SpaceTuple::new(
                    ambient,
                    multiset_list[mb].iter().map(|&i| alphabet[i].clone()).collect(),
                )
                .expect("uniform ambient");
                out.push((ta, tb));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::AdditiveCode;
    use crate::field::{FieldTower, KElem};

    fn f4() -> FieldTower {
        FieldTower::with_defaults(2, 1, 2).unwrap()
    }

    fn words(raw: &[&[u32]]) -> Vec<Vec<LElem>> {
        raw.iter()
            .map(|r| r.iter().map(|&e| LElem(e)).collect())
            .collect()
    }

    const W: u32 = 2;
    const W2: u32 = 3;

    fn ex1() -> AdditiveMap {
        let c = AdditiveCode::from_generators(&f4(), 3, &words(&[&[1, 1, 0], &[W, 0, 1]]))
            .unwrap();
        AdditiveMap::from_images(&c, words(&[&[0, W2, W], &[1, 0, 1]])).unwrap()
    }

    fn ex2() -> AdditiveMap {
        let c = AdditiveCode::from_generators(&f4(), 3, &words(&[&[0, 1, 1], &[1, 0, 1]]))
            .unwrap();
        AdditiveMap::from_images(&c, words(&[&[0, 1, 1], &[0, W, W]])).unwrap()
    }

    #[test]
    fn map_construction() {
        let f = ex1();
        assert_eq!(f.images().len(), 2);
        let c = f.domain().clone();
        assert!(AdditiveMap::from_images(&c, words(&[&[1, 1, 0]])).is_err());
        assert!(matches!(
            AdditiveMap::from_images(&c, words(&[&[9, 0, 0], &[0, 0, 0]])),
            Err(IsometryError::FieldMismatch)
        ));
        let id = AdditiveMap::identity(&c);
        assert!(is_isometry_direct(&id).unwrap());
    }

    #[test]
    fn direct_isometry_oracle() {
        assert!(is_isometry_direct(&ex1()).unwrap());
        assert!(is_isometry_direct(&ex2()).unwrap());
        let c = ex1().domain().clone();
        let bad = AdditiveMap::from_images(&c, words(&[&[1, 0, 0], &[W, 0, 1]])).unwrap();
        assert!(!is_isometry_direct(&bad).unwrap());
    }

    #[test]
    fn counterexample_profiles_agree_pointwise() {
        let t = f4();
        let f = ex2();
        let v = f.domain().column_tuple();
        let u = column_tuple_of_rows(&t, f.images(), 2, 3);
        let pv = weight_profile(t.k(), &v).unwrap();
        let pu = weight_profile(t.k(), &u).unwrap();
        assert_eq!(pv.value_at(0), 6);
        assert_eq!(pu.value_at(0), 6);
        // (0,1) has index 2 in little-endian base-2 encoding
        let idx = vec_index(t.k(), &[KElem(0), KElem(1)]);
        assert_eq!(pv.value_at(idx), 2);
        assert_eq!(pu.value_at(idx), 2);
        assert_eq!(pv, pu);
        assert!(criterion_holds(t.k(), &v, &u).unwrap());
        assert!(!tuples_equivalent(&v, &u).unwrap());
    }

    #[test]
    fn profile_of_empty_tuple_is_zero() {
        let t = f4();
        let empty = SpaceTuple::new(2, vec![]).unwrap();
        let p = weight_profile(t.k(), &empty).unwrap();
        assert!(p.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn criterion_trivial_cases() {
        let t = f4();
        let v = ex2().domain().column_tuple();
        assert!(criterion_holds(t.k(), &v, &v).unwrap());
        let line = SpaceTuple::new(
            2,
            vec![Subspace::from_spanning(t.k(), 2, &[vec![KElem(0), KElem(1)]]).unwrap()],
        )
        .unwrap();
        let zero = SpaceTuple::new(2, vec![Subspace::zero(2)]).unwrap();
        assert!(!criterion_holds(t.k(), &line, &zero).unwrap());
    }

    #[test]
    fn equivalence_is_permutation_invariant() {
        let v = ex2().domain().column_tuple();
        let mut spaces = v.spaces().to_vec();
        spaces.rotate_left(1);
        let shuffled = SpaceTuple::new(2, spaces).unwrap();
        assert!(tuples_equivalent(&v, &shuffled).unwrap());
        assert!(tuples_equivalent(&v, &v).unwrap());
    }

    #[test]
    fn decide_extendible_on_the_named_maps() {
        let d1 = decide_extendible(&ex1()).unwrap();
        assert!(d1.extends);
        assert_eq!(d1.domain_tuple.dims(), vec![2, 1, 1]);
        assert_eq!(d1.image_tuple.dims(), vec![1, 1, 2]);

        let d2 = decide_extendible(&ex2()).unwrap();
        assert!(!d2.extends);
        assert_eq!(d2.domain_tuple.dims(), vec![1, 1, 1]);
        assert_eq!(d2.image_tuple.dims(), vec![0, 2, 2]);

        let id = AdditiveMap::identity(ex1().domain());
        assert!(decide_extendible(&id).unwrap().extends);

        let c = ex1().domain().clone();
        let bad = AdditiveMap::from_images(&c, words(&[&[1, 0, 0], &[W, 0, 1]])).unwrap();
        assert!(matches!(
            decide_extendible(&bad),
            Err(IsometryError::NotAnIsometry)
        ));
    }

    #[test]
    fn brute_force_on_the_named_maps() {
        assert_eq!(monomial_candidate_count(&f4(), 3), 1296);

        let none = brute_force_extension(&ex2(), 1 << 20).unwrap();
        assert!(none.is_none());

        let found = brute_force_extension(&ex1(), 1 << 20).unwrap().unwrap();
        for (r, gen) in ex1().domain().generators().iter().enumerate() {
            assert_eq!(found.apply(gen).unwrap(), ex1().images()[r]);
        }

        let id_map = AdditiveMap::identity(ex1().domain());
        let witness = brute_force_extension(&id_map, 1 << 20).unwrap().unwrap();
        assert!(witness.is_identity());

        assert!(matches!(
            brute_force_extension(&ex1(), 10),
            Err(IsometryError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn brute_force_exec_paths_agree() {
        for f in [ex1(), ex2()] {
            let a = brute_force_extension_exec(&f, 1 << 20, Exec::Sequential).unwrap();
            let b = brute_force_extension_exec(&f, 1 << 20, Exec::Parallel).unwrap();
            match (a, b) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    assert_eq!(x.pi(), y.pi());
                    assert_eq!(x.coord_maps(), y.coord_maps());
                }
                _ => panic!("sequential and parallel disagree"),
            }
        }
    }

    #[test]
    fn galois_only_pool_is_strictly_weaker() {
        // multiplication by ω on the full line code is a K-linear isometry
        // that no field automorphism realizes
        let t = f4();
        let c = AdditiveCode::from_generators(&t, 1, &words(&[&[1], &[W]])).unwrap();
        let mult = AdditiveMap::from_images(&c, words(&[&[W], &[W2]])).unwrap();
        assert!(is_isometry_direct(&mult).unwrap());
        let full = brute_force_extension(&mult, 1 << 20).unwrap();
        assert!(full.is_some());
        let galois = crate::field::enumerate_galois(&t);
        let restricted =
            brute_force_extension_with_pool(&mult, &galois, 1 << 20, Exec::default()).unwrap();
        assert!(restricted.is_none());
    }

    #[test]
    fn apply_monomial_examples() {
        let t = f4();
        let id = MonomialMap::identity(&t, 2);
        let v = words(&[&[1, W]]).remove(0);
        assert_eq!(id.apply(&v).unwrap(), v);

        let swap = MonomialMap::new(
            vec![1, 0],
            vec![
                KLinearBijection::identity(&t),
                KLinearBijection::identity(&t),
            ],
        )
        .unwrap();
        assert_eq!(swap.apply(&v).unwrap(), words(&[&[W, 1]]).remove(0));

        // g_1 = multiplication by ω, π = id
        let mult = KLinearBijection::from_matrix(
            &t,
            vec![KElem(0), KElem(1), KElem(1), KElem(1)],
        )
        .unwrap();
        let m = MonomialMap::new(vec![0, 1], vec![mult, KLinearBijection::identity(&t)])
            .unwrap();
        assert_eq!(
            m.apply(&words(&[&[1, 0]]).remove(0)).unwrap(),
            words(&[&[W, 0]]).remove(0)
        );

        assert!(matches!(
            id.apply(&words(&[&[1, 1, 1]]).remove(0)),
            Err(IsometryError::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn covering_witness_on_the_counterexample() {
        let t = f4();
        let f = ex2();
        let v = f.domain().column_tuple();
        let u = column_tuple_of_rows(&t, f.images(), 2, 3);
        let w = covering_witness(t.k(), &v, &u).unwrap().unwrap();
        assert_eq!(w.side, TupleSide::Image);
        assert_eq!(w.index, 1);
        assert_eq!(w.parts, vec![0, 1, 2]);
        assert_eq!(w.t, 3);
        assert!(w.t as u32 >= t.q() + 1);

        // equivalent tuples yield no witness
        assert!(covering_witness(t.k(), &v, &v).unwrap().is_none());

        // a pair violating the identity is rejected
        let zero = SpaceTuple::new(2, vec![Subspace::zero(2); 3]).unwrap();
        assert!(matches!(
            covering_witness(t.k(), &v, &zero),
            Err(IsometryError::CriterionFails)
        ));
    }

    #[test]
    fn nontrivial_solution_search() {
        let t = f4();
        let k = t.k();
        assert!(search_nontrivial_solutions(k, 2, 2, None, 1 << 20)
            .unwrap()
            .is_empty());
        assert!(search_nontrivial_solutions(k, 1, 4, None, 1 << 20)
            .unwrap()
            .is_empty());

        let sols = search_nontrivial_solutions(k, 2, 3, None, 1 << 20).unwrap();
        assert!(!sols.is_empty());
        // the counterexample pair must be rediscovered
        let f = ex2();
        let v = f.domain().column_tuple().sorted_spaces();
        let u = column_tuple_of_rows(&t, f.images(), 2, 3).sorted_spaces();
        let found = sols.iter().any(|(a, b)| {
            let (sa, sb) = (a.sorted_spaces(), b.sorted_spaces());
            (sa == v && sb == u) || (sa == u && sb == v)
        });
        assert!(found);
        // all solutions carry valid covering witnesses with t ≥ q + 1
        for (a, b) in &sols {
            let w = covering_witness(k, a, b).unwrap().unwrap();
            assert!(w.t as u32 >= t.q() + 1);
        }
    }

    /// Flat walk over the full candidate space in permutation-major order;
    /// the reference the factored search must match.
    fn brute_force_flat_reference(
        f: &AdditiveMap,
        pool: &[KLinearBijection],
    ) -> Option<MonomialMap> {
        let n = f.domain().n();
        let k = f.domain().k();
        let gens = f.domain().generators();
        let images = f.images();
        let pn = (pool.len() as u64).pow(n as u32);
        let space = factorial(n) as u64 * pn;
        for idx in 0..space {
            let pi = nth_permutation(n, idx / pn);
            let mut rem = idx % pn;
            let mut g_idx = vec![0usize; n];
            for slot in (0..n).rev() {
                g_idx[slot] = (rem % pool.len() as u64) as usize;
                rem /= pool.len() as u64;
            }
            let ok = (0..k)
                .all(|r| (0..n).all(|i| pool[g_idx[i]].apply(gens[r][pi[i]]) == images[r][i]));
            if ok {
                let coord_maps = g_idx.iter().map(|&g| pool[g].clone()).collect();
                return Some(MonomialMap::new(pi, coord_maps).unwrap());
            }
        }
        None
    }

    #[test]
    fn factored_search_matches_the_flat_walk() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let t = f4();
        let gl = enumerate_gl(&t).unwrap();
        let galois = crate::field::enumerate_galois(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut cases: Vec<AdditiveMap> = vec![
            ex1(),
            ex2(),
            AdditiveMap::identity(ex1().domain()),
        ];
        // random maps, isometries or not
        for _ in 0..60 {
            let n = rng.gen_range(1..=3usize);
            let code = loop {
                let rows: Vec<Vec<LElem>> = (0..rng.gen_range(1..=2usize))
                    .map(|_| (0..n).map(|_| LElem(rng.gen_range(0..4))).collect())
                    .collect();
                if let Ok(c) = AdditiveCode::from_generators(&t, n, &rows) {
                    break c;
                }
            };
            let images: Vec<Vec<LElem>> = (0..code.k())
                .map(|_| (0..n).map(|_| LElem(rng.gen_range(0..4))).collect())
                .collect();
            cases.push(AdditiveMap::from_images(&code, images).unwrap());
        }
        for f in &cases {
            for pool in [&gl, &galois] {
                let fast =
                    brute_force_extension_with_pool(f, pool, 1 << 26, Exec::Sequential).unwrap();
                let flat = brute_force_flat_reference(f, pool);
                match (fast, flat) {
                    (None, None) => {}
                    (Some(a), Some(b)) => {
                        assert_eq!(a.pi(), b.pi());
                        assert_eq!(a.coord_maps(), b.coord_maps());
                    }
                    other => panic!("factored and flat walks disagree: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn monomial_maps_preserve_weight() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let t = f4();
        let gl = enumerate_gl(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4usize);
            let mut pi: Vec<usize> = (0..n).collect();
            pi.shuffle(&mut rng);
            let maps: Vec<KLinearBijection> = (0..n)
                .map(|_| gl[rng.gen_range(0..gl.len())].clone())
                .collect();
            let m = MonomialMap::new(pi, maps).unwrap();
            let v: Vec<LElem> = (0..n)
                .map(|_| LElem(rng.gen_range(0..t.order())))
                .collect();
            assert_eq!(weight(&m.apply(&v).unwrap()), weight(&v));
        }
    }
}
