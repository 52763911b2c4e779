//! Additive (K-linear) codes over finite field towers `GF(p) ⊆ K ⊆ L`:
//! exact arithmetic, column-space tuples, extendibility decisions for
//! additive isometries, vector-space partitions, and desk-scale verification
//! campaigns with JSON reports.
//!
//! The decision core answers one question: given a K-linear weight-preserving
//! map `f` on a K-linear code `C ⊆ L^n`, is `f` the restriction of a
//! K-monomial map of `L^n` (a coordinate permutation composed with invertible
//! K-linear transformations of `L` per coordinate)? The answer is computed
//! two independent ways — by comparing column-space tuples as multisets, and
//! by exhaustive search over the monomial candidates — and the harness module
//! cross-checks both against direct weight bookkeeping on small parameter
//! catalogs.

pub mod code;
pub mod constructions;
pub mod exec;
pub mod field;
pub mod harness;
pub mod isometry;
pub mod linalg;
mod lmat;
pub mod partitions;
pub mod wire;

pub use code::{AdditiveCode, CodeError, MdsProfile, Punctured, SpaceTuple};
pub use exec::Exec;
pub use field::{FieldError, FieldTower, KElem, KField, KLinearBijection, LElem};
pub use isometry::{AdditiveMap, ExtensionDecision, IsometryError, MonomialMap, WeightProfile};
pub use linalg::{LinalgError, MatK, Subspace};

/// Default node/candidate budget for the bounded searches.
pub const DEFAULT_BUDGET: u64 = 1 << 26;
