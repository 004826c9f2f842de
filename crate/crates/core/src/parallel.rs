//! Deterministic map/reduce helpers for grid sweeps.
//!
//! Every sweep maps indices to values, collecting them in index order, and
//! only then reduces sequentially.  The reduction result is therefore
//! bit-identical whether the map ran on one worker or many, and whether the
//! `parallel` feature is enabled at all.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n` and collect results in index order, in parallel when
/// the `parallel` feature is enabled.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential reference path, always available (used by the benches to
/// compare against the parallel path).
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Maximum of `f` over `0..n`.  NaN values are ignored.
pub fn max_over<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_indexed(n, f)
        .into_iter()
        .filter(|v| !v.is_nan())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// First index in `0..n` for which `f` returns `Some`, scanning in order.
pub fn find_first<T, F>(n: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    // Evaluate everything; pick the first hit in index order so the result
    // does not depend on scheduling.
    map_indexed(n, f).into_iter().flatten().next()
}
