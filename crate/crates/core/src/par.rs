//! Thin indirection over the data-parallel inner loops.
//!
//! With the `parallel` feature the loops run on rayon; without it they are
//! plain iterators. Results are identical either way, so the `_seq`
//! variants double as reference paths for the benchmarks.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_range_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn map_range_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_range_collect_seq(n, f)
}

#[cfg(feature = "parallel")]
pub(crate) fn all_range<F>(n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    (0..n).into_par_iter().all(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn all_range<F>(n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    (0..n).all(f)
}

/// First index in `0..n` failing the predicate, scanning in order.
///
/// The parallel variant still reports the smallest failing index so that
/// witnesses are deterministic.
#[cfg(feature = "parallel")]
pub(crate) fn first_failure<F>(n: usize, ok: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .filter(|&i| !ok(i))
        .min()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn first_failure<F>(n: usize, ok: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    (0..n).find(|&i| !ok(i))
}
