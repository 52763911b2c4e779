//! Exact linear algebra over `K`: matrices, canonical subspaces of `K^k`,
//! sums, intersections, membership, and enumeration.
//!
//! [`Subspace`] keeps its basis in reduced row echelon form with the zero rows
//! dropped, so two values are `==` exactly when they describe the same set of
//! vectors. The derived `Ord` (ambient, then dimension, then entries) is the
//! canonical ordering used wherever tuples are compared as multisets.

use thiserror::Error;

use crate::field::{KElem, KField};

/// Guard for vector/subspace enumerations.
pub const MAX_ENUMERATION: u128 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
}

/// Dense row-major matrix over `K`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MatK {
    rows: usize,
    cols: usize,
    data: Vec<KElem>,
}

impl MatK {
    pub fn new(rows: usize, cols: usize, data: Vec<KElem>) -> MatK {
        assert_eq!(rows * cols, data.len());
        MatK { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> MatK {
        MatK::new(rows, cols, vec![KElem::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> MatK {
        let mut m = MatK::zeros(n, n);
        for i in 0..n {
            m.set(i, i, KElem::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<KElem>], cols: usize) -> Result<MatK, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::LengthMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(MatK::new(rows.len(), cols, data))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> KElem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: KElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[KElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<KElem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> MatK {
        let mut out = MatK::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, k: &KField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pr) = (rank..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(pr, rank);
            let lead_inv = k.inv(self.get(rank, col)).expect("nonzero pivot");
            for c in 0..self.cols {
                self.set(rank, c, k.mul(self.get(rank, c), lead_inv));
            }
            for r in 0..self.rows {
                if r != rank && !self.get(r, col).is_zero() {
                    let factor = k.neg(self.get(r, col));
                    for c in 0..self.cols {
                        let t = k.mul(factor, self.get(rank, c));
                        self.set(r, c, k.add(self.get(r, c), t));
                    }
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self, k: &KField) -> usize {
        self.clone().rref(k).len()
    }

    /// Basis rows of the right kernel `{x : M·x = 0}`.
    pub fn null_space(&self, k: &KField) -> MatK {
        let mut r = self.clone();
        let pivots = r.rref(k);
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivot_set[c]).collect();
        let mut out = MatK::zeros(free.len(), self.cols);
        for (row, &fc) in free.iter().enumerate() {
            out.set(row, fc, KElem::ONE);
            for (i, &p) in pivots.iter().enumerate() {
                out.set(row, p, k.neg(r.get(i, fc)));
            }
        }
        out
    }

    /// `x · M` for a row vector `x` of length `rows`.
    pub fn vec_mul(&self, k: &KField, x: &[KElem]) -> Vec<KElem> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![KElem::ZERO; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr.is_zero() {
                continue;
            }
            for c in 0..self.cols {
                out[c] = k.add(out[c], k.mul(xr, self.get(r, c)));
            }
        }
        out
    }

    /// `M · x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, k: &KField, x: &[KElem]) -> Vec<KElem> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = KElem::ZERO;
                for c in 0..self.cols {
                    acc = k.add(acc, k.mul(self.get(r, c), x[c]));
                }
                acc
            })
            .collect()
    }
}

/// A subspace of `K^k` in canonical (RREF) form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: MatK,
}

impl Subspace {
    /// Canonicalizes the span of `vectors` inside `K^ambient`.
    pub fn from_spanning(
        k: &KField,
        ambient: usize,
        vectors: &[Vec<KElem>],
    ) -> Result<Subspace, LinalgError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(LinalgError::LengthMismatch {
                    expected: ambient,
                    got: v.len(),
                });
            }
        }
        let mut m = MatK::from_rows(vectors, ambient)?;
        let rank = m.rref(k).len();
        let mut data = Vec::with_capacity(rank * ambient);
        for r in 0..rank {
            data.extend_from_slice(m.row(r));
        }
        Ok(Subspace {
            ambient,
            basis: MatK::new(rank, ambient, data),
        })
    }

    pub fn zero(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: MatK::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: MatK::identity(ambient),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &MatK {
        &self.basis
    }

    fn pivot_of_row(&self, r: usize) -> usize {
        (0..self.ambient)
            .find(|&c| !self.basis.get(r, c).is_zero())
            .expect("no zero rows in canonical basis")
    }

    /// Reduces `v` modulo this subspace in place; `v` becomes zero iff it was
    /// a member.
    pub(crate) fn reduce_vec(&self, k: &KField, v: &mut [KElem]) {
        for r in 0..self.basis.rows() {
            let p = self.pivot_of_row(r);
            let c = v[p];
            if !c.is_zero() {
                let factor = k.neg(c);
                for j in 0..self.ambient {
                    v[j] = k.add(v[j], k.mul(factor, self.basis.get(r, j)));
                }
            }
        }
    }

    pub fn contains(&self, k: &KField, v: &[KElem]) -> Result<bool, LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, v.len()));
        }
        let mut w = v.to_vec();
        self.reduce_vec(k, &mut w);
        Ok(w.iter().all(|e| e.is_zero()))
    }

    pub fn sum(&self, k: &KField, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Subspace::from_spanning(k, self.ambient, &rows)
    }

    /// Intersection via the left kernel of the stacked bases.
    pub fn intersect(&self, k: &KField, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient));
        }
        let da = self.dim();
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        let stacked = MatK::from_rows(&rows, self.ambient)?;
        // y·A + z·B = 0  ⇒  y·A ∈ A ∩ B, and all intersection vectors arise so
        let kernel = stacked.transpose().null_space(k);
        let mut vecs = Vec::with_capacity(kernel.rows());
        for r in 0..kernel.rows() {
            let yz = kernel.row(r);
            vecs.push(self.basis.vec_mul(k, &yz[..da]));
        }
        Subspace::from_spanning(k, self.ambient, &vecs)
    }

    /// All `q^dim` member vectors, ordered by the base-`q` coefficient index
    /// over the canonical basis rows.
    pub fn enumerate_vectors(&self, k: &KField) -> Result<Vec<Vec<KElem>>, LinalgError> {
        let q = u128::from(k.q());
        let count = q.pow(self.dim() as u32);
        if count > MAX_ENUMERATION {
            return Err(LinalgError::TooLarge(format!(
                "q^dim = {count} exceeds {MAX_ENUMERATION}"
            )));
        }
        let mut out = Vec::with_capacity(count as usize);
        for idx in 0..count as u64 {
            let mut v = vec![KElem::ZERO; self.ambient];
            let mut rem = idx;
            for r in 0..self.dim() {
                let coeff = KElem((rem % u64::from(k.q())) as u16);
                rem /= u64::from(k.q());
                if !coeff.is_zero() {
                    for j in 0..self.ambient {
                        v[j] = k.add(v[j], k.mul(coeff, self.basis.get(r, j)));
                    }
                }
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Index of a vector of `K^len` in little-endian base-`q` order.
pub fn vec_index(k: &KField, v: &[KElem]) -> u64 {
    v.iter()
        .rev()
        .fold(0u64, |acc, e| acc * u64::from(k.q()) + u64::from(e.0))
}

/// Inverse of [`vec_index`].
pub fn index_to_vec(k: &KField, idx: u64, len: usize) -> Vec<KElem> {
    let mut out = Vec::with_capacity(len);
    let mut rem = idx;
    for _ in 0..len {
        out.push(KElem((rem % u64::from(k.q())) as u16));
        rem /= u64::from(k.q());
    }
    out
}

/// Gaussian binomial coefficient `[n k]_q`, saturating at `u128::MAX`.
pub fn gaussian_binomial(q: u64, n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut result: u128 = 1;
    let q = u128::from(q);
    for i in 1..=k {
        let num = match q.checked_pow((n - k + i) as u32) {
            Some(v) => v - 1,
            None => return u128::MAX,
        };
        let den = q.pow(i as u32) - 1;
        result = match result.checked_mul(num) {
            Some(v) => v / den,
            None => return u128::MAX,
        };
    }
    result
}

fn subspace_count(q: u64, ambient: usize, dims: &[usize]) -> u128 {
    dims.iter()
        .map(|&d| gaussian_binomial(q, ambient as u64, d as u64))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// All subspaces of `K^ambient` with dimension in `dims_filter` (all
/// dimensions if `None`), in deterministic order: dimension ascending, then
/// pivot-column sets and free entries lexicographically.
pub fn enumerate_subspaces(
    k: &KField,
    ambient: usize,
    dims_filter: Option<&[usize]>,
) -> Result<Vec<Subspace>, LinalgError> {
    let all_dims: Vec<usize> = (0..=ambient).collect();
    let mut dims: Vec<usize> = match dims_filter {
        Some(ds) => ds.iter().copied().filter(|&d| d <= ambient).collect(),
        None => all_dims,
    };
    dims.sort_unstable();
    dims.dedup();
    let count = subspace_count(u64::from(k.q()), ambient, &dims);
    if count > MAX_ENUMERATION {
        return Err(LinalgError::TooLarge(format!(
            "{count} subspaces exceed {MAX_ENUMERATION}"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    for &d in &dims {
        if d == 0 {
            out.push(Subspace::zero(ambient));
            continue;
        }
        for pivots in combinations(ambient, d) {
            let is_pivot: Vec<bool> = {
                let mut v = vec![false; ambient];
                for &p in &pivots {
                    v[p] = true;
                }
                v
            };
            // free cells: row i, column j with j > pivots[i] and j not a pivot
            let mut free: Vec<(usize, usize)> = Vec::new();
            for (i, &p) in pivots.iter().enumerate() {
                for j in p + 1..ambient {
                    if !is_pivot[j] {
                        free.push((i, j));
                    }
                }
            }
            let q = u64::from(k.q());
            let assignments = q.pow(free.len() as u32);
            for a in 0..assignments {
                let mut basis = MatK::zeros(d, ambient);
                for (i, &p) in pivots.iter().enumerate() {
                    basis.set(i, p, KElem::ONE);
                }
                let mut rem = a;
                for &(i, j) in &free {
                    basis.set(i, j, KElem((rem % q) as u16));
                    rem /= q;
                }
                out.push(Subspace { ambient, basis });
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let needed = k - current.len();
        for i in start..=n.saturating_sub(needed) {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}
