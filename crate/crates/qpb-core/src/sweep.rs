//! Data-parallel sweeps with a sequential fallback. Exact arithmetic makes
//! the per-item work chunky, so whole-suite validation sweeps fan out across
//! threads when the `parallel` feature (default) is on.

/// map over items, parallel when the feature is enabled; order is preserved
#[cfg(feature = "parallel")]
pub fn sweep_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn sweep_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// sequential map with the same shape, kept unconditionally for benchmarks
pub fn sweep_map_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// all-of over items; parallel when enabled, short-circuit when not
#[cfg(feature = "parallel")]
pub fn sweep_all<T, F>(items: Vec<T>, f: F) -> bool
where
    T: Send,
    F: Fn(T) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().all(f)
}

#[cfg(not(feature = "parallel"))]
pub fn sweep_all<T, F>(items: Vec<T>, f: F) -> bool
where
    F: Fn(T) -> bool,
{
    items.into_iter().all(f)
}
