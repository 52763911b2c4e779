//! Execution strategy for the search-heavy loops.
//!
//! Every helper here has a sequential and a rayon-backed path and both return
//! bit-identical results: order-sensitive reductions use `find_first` /
//! index-ordered collection, never racy first-wins semantics. With the
//! `parallel` feature disabled, [`Exec::Parallel`] silently degrades to the
//! sequential path.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which engine drives a search loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing; falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    #[cfg(feature = "parallel")]
    pub(crate) fn is_parallel(self) -> bool {
        matches!(self, Exec::Parallel)
    }

    #[cfg(not(feature = "parallel"))]
    pub(crate) fn is_parallel(self) -> bool {
        false
    }
}

/// First `Some` produced by `f` over `range`, in index order.
pub(crate) fn range_find_map_first<T, F>(exec: Exec, range: Range<u64>, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().find_map_first(|i| f(i));
    }
    let _ = exec;
    range.into_iter().find_map(f)
}

/// `f` applied over `range`, keeping `Some` results in index order.
pub(crate) fn range_filter_map<T, F>(exec: Exec, range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().filter_map(|i| f(i)).collect();
    }
    let _ = exec;
    range.into_iter().filter_map(f).collect()
}

/// Minimum of `f` over `range`; `None` for an empty range.
pub(crate) fn range_min<F>(exec: Exec, range: Range<u64>, f: F) -> Option<usize>
where
    F: Fn(u64) -> usize + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().map(|i| f(i)).min();
    }
    let _ = exec;
    range.into_iter().map(f).min()
}

/// True iff `pred` holds on all of `range`.
pub(crate) fn range_all<F>(exec: Exec, range: Range<u64>, pred: F) -> bool
where
    F: Fn(u64) -> bool + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().all(|i| pred(i));
    }
    let _ = exec;
    range.into_iter().all(pred)
}

/// Maps `f` over `items`, preserving item order in the output.
pub(crate) fn map_ordered<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}
