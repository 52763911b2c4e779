//! Arithmetic in two-level finite field towers `GF(p) ⊆ K ⊆ L`.
//!
//! `K = GF(p)[x]/(k_poly)` and `L = K[y]/(l_poly)`, both moduli monic and
//! irreducible. Elements use little-endian digit encodings: a [`KElem`] is the
//! base-`p` integer of its coefficient vector, an [`LElem`] the base-`q`
//! integer of its `K`-coordinates in the power basis `{1, α, …, α^(m−1)}`,
//! where `α` is the residue of the indeterminate of `l_poly`. These encodings
//! are also the wire format, so files are bit-exact across platforms.
//!
//! All arithmetic is table-driven and towers are immutable, so a
//! [`FieldTower`] is a cheap handle that can be shared freely across threads.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Desk-scale cap on `|K|`.
pub const MAX_K_ORDER: u32 = 512;
/// Desk-scale cap on `|L|`.
pub const MAX_L_ORDER: u32 = 1024;
/// Guard on raw candidate matrices scanned by [`enumerate_gl`].
pub const MAX_GL_CANDIDATES: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("reducible polynomial: {0}")]
    Reducible(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("matrix is singular")]
    Singular,
}

/// Element of `K`, encoded as the base-`p` integer of its coefficients.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KElem(pub u16);

/// Element of `L`, encoded as the base-`q` integer of its `K`-coordinates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LElem(pub u32);

impl KElem {
    pub const ZERO: KElem = KElem(0);
    pub const ONE: KElem = KElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl LElem {
    pub const ZERO: LElem = LElem(0);
    pub const ONE: LElem = LElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K({})", self.0)
    }
}

impl fmt::Debug for LElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({})", self.0)
    }
}

// ---------------------------------------------------------------------------
// digit helpers

pub(crate) fn to_digits(mut x: u64, base: u64, len: usize) -> Vec<u16> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((x % base) as u16);
        x /= base;
    }
    out
}

pub(crate) fn from_digits(digits: &[u16], base: u64) -> u64 {
    digits
        .iter()
        .rev()
        .fold(0u64, |acc, &d| acc * base + u64::from(d))
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

// ---------------------------------------------------------------------------
// generic polynomial arithmetic over a small field, used for both levels

/// Minimal field interface for the polynomial routines: elements are indices
/// below `order()`.
pub(crate) trait Arith {
    fn order(&self) -> u32;
    fn a_add(&self, a: u16, b: u16) -> u16;
    fn a_mul(&self, a: u16, b: u16) -> u16;
    fn a_neg(&self, a: u16) -> u16;
}

struct PrimeArith(u32);

impl Arith for PrimeArith {
    fn order(&self) -> u32 {
        self.0
    }
    fn a_add(&self, a: u16, b: u16) -> u16 {
        ((u32::from(a) + u32::from(b)) % self.0) as u16
    }
    fn a_mul(&self, a: u16, b: u16) -> u16 {
        ((u32::from(a) * u32::from(b)) % self.0) as u16
    }
    fn a_neg(&self, a: u16) -> u16 {
        if a == 0 {
            0
        } else {
            (self.0 - u32::from(a)) as u16
        }
    }
}

fn poly_is_zero(v: &[u16]) -> bool {
    v.iter().all(|&c| c == 0)
}

fn poly_mul(a: &[u16], b: &[u16], f: &impl Arith) -> Vec<u16> {
    let mut out = vec![0u16; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.a_add(out[i + j], f.a_mul(ai, bj));
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `modulus`.
fn poly_rem(a: &[u16], modulus: &[u16], f: &impl Arith) -> Vec<u16> {
    let deg_m = modulus.len() - 1;
    let mut rem: Vec<u16> = a.to_vec();
    while rem.len() > deg_m {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - deg_m;
            let neg_lead = f.a_neg(lead);
            for (j, &mj) in modulus.iter().enumerate() {
                rem[shift + j] = f.a_add(rem[shift + j], f.a_mul(neg_lead, mj));
            }
        }
        rem.pop();
    }
    while rem.len() < deg_m {
        rem.push(0);
    }
    rem
}

/// Trial-division irreducibility test for a monic polynomial, desk scale.
fn poly_is_irreducible(poly: &[u16], f: &impl Arith) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    let q = u64::from(f.order());
    for d in 1..=deg / 2 {
        let count = match checked_pow(q, d as u32) {
            Some(c) => c,
            None => return false,
        };
        for idx in 0..count {
            let mut g = to_digits(idx, q, d);
            g.push(1); // monic of degree d
            let r = poly_rem(poly, &g, f);
            if poly_is_zero(&r) {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(deg: usize, f: &impl Arith) -> Vec<u16> {
    let q = u64::from(f.order());
    let count = checked_pow(q, deg as u32).expect("desk-scale degree");
    for idx in 0..count {
        let mut g = to_digits(idx, q, deg);
        g.push(1);
        if poly_is_irreducible(&g, f) {
            return g;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over a finite field")
}

// ---------------------------------------------------------------------------
// K = GF(p)[x]/(k_poly)

/// The middle field `K = GF(p^s)` with table-driven arithmetic.
#[derive(Clone)]
pub struct KField {
    p: u32,
    s: usize,
    q: u32,
    k_poly: Vec<u16>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl KField {
    pub fn new(p: u32, k_poly: &[u32]) -> Result<KField, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k_poly.len() < 2 {
            return Err(FieldError::DegreeMismatch(
                "k_poly must have degree at least 1".into(),
            ));
        }
        if k_poly.iter().any(|&c| c >= p) {
            return Err(FieldError::DegreeMismatch(format!(
                "k_poly coefficients must lie below p = {p}"
            )));
        }
        if *k_poly.last().unwrap() != 1 {
            return Err(FieldError::DegreeMismatch("k_poly must be monic".into()));
        }
        let s = k_poly.len() - 1;
        let k_poly: Vec<u16> = k_poly.iter().map(|&c| c as u16).collect();
        let arith = PrimeArith(p);
        if !poly_is_irreducible(&k_poly, &arith) {
            return Err(FieldError::Reducible("k_poly".into()));
        }
        let q64 = checked_pow(u64::from(p), s as u32)
            .filter(|&q| q <= u64::from(MAX_K_ORDER))
            .ok_or_else(|| FieldError::TooLarge(format!("|K| exceeds {MAX_K_ORDER}")))?;
        let q = q64 as u32;
        let qs = q as usize;

        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        for a in 0..qs {
            let da = to_digits(a as u64, u64::from(p), s);
            neg[a] = from_digits(
                &da.iter().map(|&c| arith.a_neg(c)).collect::<Vec<_>>(),
                u64::from(p),
            ) as u16;
            for b in 0..qs {
                let db = to_digits(b as u64, u64::from(p), s);
                let sum: Vec<u16> = da
                    .iter()
                    .zip(&db)
                    .map(|(&x, &y)| arith.a_add(x, y))
                    .collect();
                add[a * qs + b] = from_digits(&sum, u64::from(p)) as u16;
                let prod = poly_rem(&poly_mul(&da, &db, &arith), &k_poly, &arith);
                mul[a * qs + b] = from_digits(&prod, u64::from(p)) as u16;
            }
        }
        let mut inv = vec![0u16; qs];
        for a in 1..qs {
            for b in 1..qs {
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
        }
        Ok(KField {
            p,
            s,
            q,
            k_poly,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// `|K| = p^s`.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k_poly(&self) -> Vec<u32> {
        self.k_poly.iter().map(|&c| u32::from(c)).collect()
    }

    pub fn elem(&self, v: u64) -> Result<KElem, FieldError> {
        if v < u64::from(self.q) {
            Ok(KElem(v as u16))
        } else {
            Err(FieldError::TooLarge(format!(
                "{v} is not a valid K-element (q = {})",
                self.q
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = KElem> + '_ {
        (0..self.q as u16).map(KElem)
    }

    #[inline]
    pub fn add(&self, a: KElem, b: KElem) -> KElem {
        KElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: KElem, b: KElem) -> KElem {
        KElem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: KElem) -> KElem {
        KElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: KElem, b: KElem) -> KElem {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: KElem) -> Result<KElem, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(KElem(self.inv[a.0 as usize]))
        }
    }
}

impl Arith for KField {
    fn order(&self) -> u32 {
        self.q
    }
    fn a_add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q as usize + b as usize]
    }
    fn a_mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q as usize + b as usize]
    }
    fn a_neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }
}

impl fmt::Debug for KField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) = GF({})", self.p, self.s, self.q)
    }
}

impl PartialEq for KField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k_poly == other.k_poly
    }
}

impl Eq for KField {}

// ---------------------------------------------------------------------------
// L = K[y]/(l_poly)

struct Tower {
    k: KField,
    m: usize,
    l_poly: Vec<u16>,
    order: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    expand: Vec<u16>, // order * m, K-coordinates
    scalar: Vec<u32>, // q * order, K-scalar times L-element
}

/// The full tower `GF(p) ⊆ K ⊆ L`. Cheap to clone; all operations are pure.
#[derive(Clone)]
pub struct FieldTower {
    inner: Arc<Tower>,
}

impl FieldTower {
    /// Builds a tower from `p`, `k_poly` over `GF(p)` (integer coefficients,
    /// ascending) and `l_poly` over `K` (K-element encodings, ascending).
    pub fn new(p: u32, k_poly: &[u32], l_poly: &[u32]) -> Result<FieldTower, FieldError> {
        let k = KField::new(p, k_poly)?;
        let q = k.q();
        if l_poly.len() < 2 {
            return Err(FieldError::DegreeMismatch(
                "l_poly must have degree at least 1".into(),
            ));
        }
        if l_poly.iter().any(|&c| c >= q) {
            return Err(FieldError::DegreeMismatch(format!(
                "l_poly coefficients must be K-elements below q = {q}"
            )));
        }
        if *l_poly.last().unwrap() != 1 {
            return Err(FieldError::DegreeMismatch("l_poly must be monic".into()));
        }
        let m = l_poly.len() - 1;
        let l_poly: Vec<u16> = l_poly.iter().map(|&c| c as u16).collect();
        if !poly_is_irreducible(&l_poly, &k) {
            return Err(FieldError::Reducible("l_poly".into()));
        }
        let order64 = checked_pow(u64::from(q), m as u32)
            .filter(|&v| v <= u64::from(MAX_L_ORDER))
            .ok_or_else(|| FieldError::TooLarge(format!("|L| exceeds {MAX_L_ORDER}")))?;
        let order = order64 as u32;
        let os = order as usize;
        let qu = u64::from(q);

        let mut expand = vec![0u16; os * m];
        for x in 0..os {
            let dx = to_digits(x as u64, qu, m);
            expand[x * m..(x + 1) * m].copy_from_slice(&dx);
        }
        let digits = |x: usize| &expand[x * m..(x + 1) * m];

        let mut add = vec![0u32; os * os];
        let mut mul = vec![0u32; os * os];
        let mut neg = vec![0u32; os];
        for x in 0..os {
            let dx = digits(x).to_vec();
            neg[x] = from_digits(
                &dx.iter().map(|&c| k.a_neg(c)).collect::<Vec<_>>(),
                qu,
            ) as u32;
            for y in 0..os {
                let dy = digits(y);
                let sum: Vec<u16> = dx.iter().zip(dy).map(|(&a, &b)| k.a_add(a, b)).collect();
                add[x * os + y] = from_digits(&sum, qu) as u32;
                let prod = poly_rem(&poly_mul(&dx, dy, &k), &l_poly, &k);
                mul[x * os + y] = from_digits(&prod, qu) as u32;
            }
        }
        let mut inv = vec![0u32; os];
        for x in 1..os {
            for y in 1..os {
                if mul[x * os + y] == 1 {
                    inv[x] = y as u32;
                    break;
                }
            }
        }
        let mut scalar = vec![0u32; q as usize * os];
        for a in 0..q as usize {
            for x in 0..os {
                let prod: Vec<u16> = digits(x).iter().map(|&c| k.a_mul(a as u16, c)).collect();
                scalar[a * os + x] = from_digits(&prod, qu) as u32;
            }
        }

        Ok(FieldTower {
            inner: Arc::new(Tower {
                k,
                m,
                l_poly,
                order,
                add,
                mul,
                neg,
                inv,
                expand,
                scalar,
            }),
        })
    }

    /// Builds the tower with the default (lexicographically first) irreducible
    /// moduli for the requested degrees.
    pub fn with_defaults(p: u32, s: usize, m: usize) -> Result<FieldTower, FieldError> {
        let k_poly = default_k_poly(p, s)?;
        let k = KField::new(p, &k_poly)?;
        let l_poly = default_l_poly(&k, m)?;
        FieldTower::new(p, &k_poly, &l_poly)
    }

    pub fn k(&self) -> &KField {
        &self.inner.k
    }

    pub fn p(&self) -> u32 {
        self.inner.k.p
    }

    pub fn s(&self) -> usize {
        self.inner.k.s
    }

    /// `|K|`.
    pub fn q(&self) -> u32 {
        self.inner.k.q
    }

    /// Degree of `L` over `K`.
    pub fn m(&self) -> usize {
        self.inner.m
    }

    /// `|L| = q^m`.
    pub fn order(&self) -> u32 {
        self.inner.order
    }

    pub fn l_poly(&self) -> Vec<u32> {
        self.inner.l_poly.iter().map(|&c| u32::from(c)).collect()
    }

    pub fn elem(&self, v: u64) -> Result<LElem, FieldError> {
        if v < u64::from(self.inner.order) {
            Ok(LElem(v as u32))
        } else {
            Err(FieldError::TooLarge(format!(
                "{v} is not a valid L-element (|L| = {})",
                self.inner.order
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = LElem> + '_ {
        (0..self.inner.order).map(LElem)
    }

    #[inline]
    pub fn add(&self, a: LElem, b: LElem) -> LElem {
        LElem(self.inner.add[a.0 as usize * self.inner.order as usize + b.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: LElem, b: LElem) -> LElem {
        LElem(self.inner.mul[a.0 as usize * self.inner.order as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: LElem) -> LElem {
        LElem(self.inner.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: LElem, b: LElem) -> LElem {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: LElem) -> Result<LElem, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(LElem(self.inner.inv[a.0 as usize]))
        }
    }

    pub fn pow(&self, x: LElem, e: u64) -> LElem {
        let mut acc = LElem::ONE;
        for _ in 0..e {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Product of a `K`-scalar with an `L`-element (coordinate-wise in the
    /// power basis).
    #[inline]
    pub fn scalar_mul(&self, a: KElem, x: LElem) -> LElem {
        LElem(self.inner.scalar[a.0 as usize * self.inner.order as usize + x.0 as usize])
    }

    /// The `K`-coordinates of `x` in the power basis, length `m`.
    pub fn expand(&self, x: LElem) -> Vec<KElem> {
        let m = self.inner.m;
        self.inner.expand[x.0 as usize * m..(x.0 as usize + 1) * m]
            .iter()
            .map(|&c| KElem(c))
            .collect()
    }

    /// `j`-th `K`-coordinate of `x`.
    #[inline]
    pub fn expand_coord(&self, x: LElem, j: usize) -> KElem {
        KElem(self.inner.expand[x.0 as usize * self.inner.m + j])
    }

    /// Inverse of [`expand`](Self::expand).
    pub fn assemble(&self, coords: &[KElem]) -> Result<LElem, FieldError> {
        if coords.len() != self.inner.m {
            return Err(FieldError::LengthMismatch {
                expected: self.inner.m,
                got: coords.len(),
            });
        }
        let digits: Vec<u16> = coords.iter().map(|c| c.0).collect();
        Ok(LElem(from_digits(&digits, u64::from(self.q())) as u32))
    }

    /// Embedding of `K` into `L` (constant coordinate).
    #[inline]
    pub fn embed_k(&self, a: KElem) -> LElem {
        LElem(u32::from(a.0))
    }

    /// The power basis `1, α, …, α^(m−1)` of `L` over `K`.
    pub fn basis(&self) -> Vec<LElem> {
        (0..self.inner.m as u32)
            .map(|j| LElem(self.q().pow(j)))
            .collect()
    }

    /// First element of `L \ K` in encoding order, if any (`m ≥ 2`).
    pub fn first_outside_k(&self) -> Option<LElem> {
        if self.inner.m >= 2 {
            Some(LElem(self.q()))
        } else {
            None
        }
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.p() == other.p()
                && self.inner.k.k_poly == other.inner.k.k_poly
                && self.inner.l_poly == other.inner.l_poly)
    }
}

impl Eq for FieldTower {}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}) over GF({}) (p = {}, s = {}, m = {})",
            self.order(),
            self.q(),
            self.p(),
            self.s(),
            self.m()
        )
    }
}

/// Default `k_poly` for `GF(p^s)`: `x` for `s = 1`, otherwise the
/// lexicographically first monic irreducible of degree `s`.
pub fn default_k_poly(p: u32, s: usize) -> Result<Vec<u32>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if s == 0 {
        return Err(FieldError::DegreeMismatch("s must be at least 1".into()));
    }
    if s == 1 {
        return Ok(vec![0, 1]);
    }
    let poly = first_irreducible(s, &PrimeArith(p));
    Ok(poly.into_iter().map(u32::from).collect())
}

/// Default `l_poly` over `K`: the lexicographically first monic irreducible
/// of degree `m` (coefficients as K-element encodings).
pub fn default_l_poly(k: &KField, m: usize) -> Result<Vec<u32>, FieldError> {
    if m == 0 {
        return Err(FieldError::DegreeMismatch("m must be at least 1".into()));
    }
    if m == 1 {
        return Ok(vec![0, 1]);
    }
    let poly = first_irreducible(m, k);
    Ok(poly.into_iter().map(u32::from).collect())
}

// ---------------------------------------------------------------------------
// invertible K-linear maps on L

fn rank_of(k: &KField, rows: usize, cols: usize, data: &mut [u16]) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| data[r * cols + col] != 0);
        let Some(pr) = pivot else { continue };
        data.swap_chunks(pr, rank, cols);
        let lead = data[rank * cols + col];
        let lead_inv = k.inv(KElem(lead)).expect("nonzero pivot").0;
        for c in 0..cols {
            data[rank * cols + c] = k.a_mul(data[rank * cols + c], lead_inv);
        }
        for r in 0..rows {
            if r != rank && data[r * cols + col] != 0 {
                let factor = k.a_neg(data[r * cols + col]);
                for c in 0..cols {
                    let t = k.a_mul(factor, data[rank * cols + c]);
                    data[r * cols + c] = k.a_add(data[r * cols + c], t);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize);
}

impl SwapChunks for [u16] {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize) {
        if a == b {
            return;
        }
        for c in 0..width {
            self.swap(a * width + c, b * width + c);
        }
    }
}

/// An invertible `K`-linear transformation of `L`, stored as an `m × m`
/// matrix over `K` acting on coordinate columns, with a precomputed action
/// table on all of `L`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KLinearBijection {
    m: usize,
    mat: Vec<KElem>,
    action: Vec<LElem>,
}

impl KLinearBijection {
    pub fn from_matrix(t: &FieldTower, entries: Vec<KElem>) -> Result<Self, FieldError> {
        let m = t.m();
        if entries.len() != m * m {
            return Err(FieldError::LengthMismatch {
                expected: m * m,
                got: entries.len(),
            });
        }
        let mut probe: Vec<u16> = entries.iter().map(|e| e.0).collect();
        if rank_of(t.k(), m, m, &mut probe) != m {
            return Err(FieldError::Singular);
        }
        Ok(Self::from_matrix_unchecked(t, entries))
    }

    fn from_matrix_unchecked(t: &FieldTower, entries: Vec<KElem>) -> Self {
        let m = t.m();
        let k = t.k();
        let order = t.order() as usize;
        let mut action = Vec::with_capacity(order);
        for x in 0..order as u32 {
            let lx = LElem(x);
            let mut out = vec![KElem::ZERO; m];
            for (r, o) in out.iter_mut().enumerate() {
                let mut acc = KElem::ZERO;
                for c in 0..m {
                    acc = k.add(acc, k.mul(entries[r * m + c], t.expand_coord(lx, c)));
                }
                *o = acc;
            }
            action.push(t.assemble(&out).expect("length m"));
        }
        KLinearBijection {
            m,
            mat: entries,
            action,
        }
    }

    pub fn identity(t: &FieldTower) -> Self {
        let m = t.m();
        let mut entries = vec![KElem::ZERO; m * m];
        for i in 0..m {
            entries[i * m + i] = KElem::ONE;
        }
        Self::from_matrix_unchecked(t, entries)
    }

    #[inline]
    pub fn apply(&self, x: LElem) -> LElem {
        self.action[x.0 as usize]
    }

    pub fn matrix(&self) -> &[KElem] {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_identity(&self) -> bool {
        self.mat
            .iter()
            .enumerate()
            .all(|(i, &e)| e == if i % (self.m + 1) == 0 { KElem::ONE } else { KElem::ZERO })
    }
}

impl fmt::Debug for KLinearBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KLinearBijection(")?;
        for r in 0..self.m {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.m {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.mat[r * self.m + c].0)?;
            }
        }
        write!(f, ")")
    }
}

/// `|GL_m(K)| = Π_{i<m} (q^m − q^i)`.
pub fn gl_order(t: &FieldTower) -> u128 {
    let q = u128::from(t.q());
    let qm = u128::from(t.order());
    (0..t.m() as u32).map(|i| qm - q.pow(i)).product()
}

/// All invertible `K`-linear transformations of `L`, in lexicographic order
/// of their row-major matrix entries.
pub fn enumerate_gl(t: &FieldTower) -> Result<Vec<KLinearBijection>, FieldError> {
    let m = t.m();
    let q = u64::from(t.q());
    let cells = (m * m) as u32;
    let candidates = checked_pow(q, cells)
        .filter(|&c| c <= MAX_GL_CANDIDATES)
        .ok_or_else(|| {
            FieldError::TooLarge(format!(
                "q^(m^2) candidate matrices exceed {MAX_GL_CANDIDATES}"
            ))
        })?;
    let mut out = Vec::new();
    let mut probe = vec![0u16; m * m];
    for idx in 0..candidates {
        // row-major entries, first entry most significant: ascending idx is
        // lexicographic order on the entry sequence
        let mut rem = idx;
        for t_pos in (0..(m * m)).rev() {
            probe[t_pos] = (rem % q) as u16;
            rem /= q;
        }
        let mut scratch = probe.clone();
        if rank_of(t.k(), m, m, &mut scratch) == m {
            let entries: Vec<KElem> = probe.iter().map(|&e| KElem(e)).collect();
            out.push(KLinearBijection::from_matrix_unchecked(t, entries));
        }
    }
    Ok(out)
}

/// The `K`-automorphisms of the field `L` (powers of the relative Frobenius
/// `x ↦ x^q`), as coordinate matrices. A strict subset of [`enumerate_gl`]
/// for `m ≥ 2`: scalar multiplications by elements of `L \ K` are K-linear
/// bijections but not field automorphisms.
pub fn enumerate_galois(t: &FieldTower) -> Vec<KLinearBijection> {
    let m = t.m();
    let q = u64::from(t.q());
    let mut out = Vec::with_capacity(m);
    for j in 0..m as u32 {
        let e = checked_pow(q, j).expect("desk scale");
        let basis = t.basis();
        let mut entries = vec![KElem::ZERO; m * m];
        for (c, &b) in basis.iter().enumerate() {
            let img = t.pow(b, e);
            for r in 0..m {
                entries[r * m + c] = t.expand_coord(img, r);
            }
        }
        out.push(KLinearBijection::from_matrix(t, entries).expect("Frobenius powers are bijective"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn f4_over_f2() -> FieldTower {
        FieldTower::new(2, &[0, 1], &[1, 1, 1]).unwrap()
    }

    #[test]
    fn tower_construction_examples() {
        // F_2 ⊂ F_4 ⊂ F_16 with l_poly = y^2 + y + β, β the K-generator
        let t = FieldTower::new(2, &[1, 1, 1], &[2, 1, 1]).unwrap();
        assert_eq!(t.q(), 4);
        assert_eq!(t.m(), 2);
        assert_eq!(t.order(), 16);

        let t = f4_over_f2();
        assert_eq!((t.p(), t.s(), t.q(), t.m(), t.order()), (2, 1, 2, 2, 4));

        // y^2 + y = y(y + 1) is reducible
        let err = FieldTower::new(2, &[0, 1], &[0, 1, 1]).unwrap_err();
        assert_eq!(err, FieldError::Reducible("l_poly".into()));

        assert!(matches!(
            FieldTower::new(4, &[0, 1], &[1, 1, 1]),
            Err(FieldError::NotPrime(4))
        ));
    }

    #[test]
    fn f4_multiplication() {
        let t = f4_over_f2();
        let w = LElem(2); // ω
        let w2 = LElem(3); // ω + 1
        assert_eq!(t.mul(w, w), w2);
        assert_eq!(t.mul(w, w2), LElem::ONE);
        assert_eq!(t.inv(w).unwrap(), w2);
        assert_eq!(t.inv(LElem::ZERO), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn expand_assemble() {
        let t = f4_over_f2();
        assert_eq!(t.expand(LElem(3)), vec![KElem(1), KElem(1)]);
        assert_eq!(t.expand(LElem::ZERO), vec![KElem(0), KElem(0)]);
        assert_eq!(t.assemble(&[KElem(0), KElem(1)]).unwrap(), LElem(2));
        assert!(matches!(
            t.assemble(&[KElem(0)]),
            Err(FieldError::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn embed_examples() {
        let t = f4_over_f2();
        assert_eq!(t.embed_k(KElem::ZERO), LElem::ZERO);
        assert_eq!(t.embed_k(KElem::ONE), LElem::ONE);
        // β ∈ F_4 lands on the constant-coordinate element of F_16
        let t16 = FieldTower::new(2, &[1, 1, 1], &[2, 1, 1]).unwrap();
        assert_eq!(t16.embed_k(KElem(2)), LElem(2));
        assert_eq!(t16.expand(LElem(2)), vec![KElem(2), KElem(0)]);
    }

    #[test]
    fn embed_is_ring_homomorphism() {
        let t16 = FieldTower::new(2, &[1, 1, 1], &[2, 1, 1]).unwrap();
        let k = t16.k();
        for a in k.elements() {
            for b in k.elements() {
                assert_eq!(
                    t16.embed_k(k.add(a, b)),
                    t16.add(t16.embed_k(a), t16.embed_k(b))
                );
                assert_eq!(
                    t16.embed_k(k.mul(a, b)),
                    t16.mul(t16.embed_k(a), t16.embed_k(b))
                );
            }
        }
    }

    fn axioms(t: &FieldTower) {
        for a in t.elements() {
            assert_eq!(t.add(a, t.neg(a)), LElem::ZERO);
            if !a.is_zero() {
                assert_eq!(t.mul(a, t.inv(a).unwrap()), LElem::ONE);
            }
            for b in t.elements() {
                assert_eq!(t.add(a, b), t.add(b, a));
                assert_eq!(t.mul(a, b), t.mul(b, a));
                for c in t.elements() {
                    assert_eq!(t.mul(a, t.mul(b, c)), t.mul(t.mul(a, b), c));
                    assert_eq!(t.add(a, t.add(b, c)), t.add(t.add(a, b), c));
                    assert_eq!(
                        t.mul(a, t.add(b, c)),
                        t.add(t.mul(a, b), t.mul(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn field_axioms_up_to_order_sixteen() {
        axioms(&f4_over_f2());
        axioms(&FieldTower::new(2, &[0, 1], &[1, 1, 0, 1]).unwrap()); // F_8
        axioms(&FieldTower::new(2, &[0, 1], &[1, 1, 0, 0, 1]).unwrap()); // F_16 / F_2
        axioms(&FieldTower::new(2, &[1, 1, 1], &[2, 1, 1]).unwrap()); // F_16 / F_4
        axioms(&FieldTower::new(3, &[0, 1], &[1, 0, 1]).unwrap()); // F_9 / F_3
    }

    #[test]
    fn expand_assemble_roundtrip_and_linearity() {
        for t in [
            f4_over_f2(),
            FieldTower::new(2, &[0, 1], &[1, 1, 0, 0, 1]).unwrap(),
            FieldTower::new(2, &[1, 1, 1], &[2, 1, 1]).unwrap(),
            FieldTower::new(3, &[0, 1], &[1, 0, 1]).unwrap(),
        ] {
            for x in t.elements() {
                assert_eq!(t.assemble(&t.expand(x)).unwrap(), x);
                for y in t.elements() {
                    let s = t.add(x, y);
                    let k = t.k();
                    let sum: Vec<KElem> = t
                        .expand(x)
                        .iter()
                        .zip(t.expand(y).iter())
                        .map(|(&a, &b)| k.add(a, b))
                        .collect();
                    assert_eq!(t.expand(s), sum);
                }
            }
        }
    }

    #[test]
    fn gl_counts() {
        let t1 = FieldTower::new(2, &[0, 1], &[0, 1]).unwrap(); // m = 1
        assert_eq!(enumerate_gl(&t1).unwrap().len(), 1);
        assert_eq!(enumerate_gl(&f4_over_f2()).unwrap().len(), 6);
        let t9 = FieldTower::new(3, &[0, 1], &[1, 0, 1]).unwrap();
        assert_eq!(enumerate_gl(&t9).unwrap().len(), 48);
        assert_eq!(gl_order(&t9), 48);
    }

    #[test]
    fn gl_elements_are_invertible_bijections() {
        let t = f4_over_f2();
        for g in enumerate_gl(&t).unwrap() {
            let mut seen = vec![false; t.order() as usize];
            for x in t.elements() {
                let y = g.apply(x);
                assert!(!seen[y.0 as usize]);
                seen[y.0 as usize] = true;
            }
            assert_eq!(g.apply(LElem::ZERO), LElem::ZERO);
        }
    }

    #[test]
    fn scalar_multiplications_appear_in_gl() {
        // multiplication by any fixed nonzero λ ∈ L is K-linear and invertible,
        // so it must occur in the enumeration
        let t = f4_over_f2();
        let gl = enumerate_gl(&t).unwrap();
        for lambda in t.elements().filter(|l| !l.is_zero()) {
            let found = gl.iter().any(|g| t.elements().all(|x| g.apply(x) == t.mul(lambda, x)));
            assert!(found, "multiplication by {lambda:?} missing from GL");
        }
    }

    #[test]
    fn galois_subgroup() {
        let t = f4_over_f2();
        let gal = enumerate_galois(&t);
        assert_eq!(gal.len(), 2);
        assert!(gal[0].is_identity());
        // Frobenius is not a scalar multiplication by ω
        let w = LElem(2);
        assert_eq!(gal[1].apply(w), t.mul(w, w));
        // every Galois element appears in the GL enumeration
        let gl = enumerate_gl(&t).unwrap();
        for g in &gal {
            assert!(gl.iter().any(|h| h == g));
        }
    }

    #[test]
    fn default_polynomials_match_fixed_table() {
        assert_eq!(default_k_poly(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(default_k_poly(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(default_k_poly(3, 2).unwrap(), vec![1, 0, 1]);
        let f2 = KField::new(2, &[0, 1]).unwrap();
        assert_eq!(default_l_poly(&f2, 2).unwrap(), vec![1, 1, 1]); // x^2+x+1
        assert_eq!(default_l_poly(&f2, 3).unwrap(), vec![1, 1, 0, 1]); // x^3+x+1
        assert_eq!(default_l_poly(&f2, 4).unwrap(), vec![1, 1, 0, 0, 1]); // x^4+x+1
        let f3 = KField::new(3, &[0, 1]).unwrap();
        assert_eq!(default_l_poly(&f3, 2).unwrap(), vec![1, 0, 1]); // x^2+1
    }

    #[test]
    fn tower_equality_is_structural() {
        let a = FieldTower::with_defaults(2, 1, 2).unwrap();
        let b = f4_over_f2();
        assert_eq!(a, b);
        let c = FieldTower::new(2, &[0, 1], &[1, 1, 0, 1]).unwrap();
        assert_ne!(a, c);
    }
}
