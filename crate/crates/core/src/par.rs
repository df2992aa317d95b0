//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these run on the ambient rayon pool; without
//! it they are plain loops. Reductions combine adjacent partial results in
//! index order, so any associative `reduce` gives the same answer for every
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..len` and folds the results with an associative `reduce`.
pub fn map_reduce<T, M, R, I>(len: usize, identity: I, map: M, reduce: R) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    M: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len)
            .into_par_iter()
            .with_min_len(64)
            .map(map)
            .reduce(&identity, &reduce)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(map).fold(identity(), reduce)
    }
}

/// Folds each contiguous chunk of `0..len` with `fold`, then merges chunk
/// results in order with `reduce`.
pub fn fold_chunks<T, F, R, I>(len: usize, identity: I, fold: F, reduce: R) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len)
            .into_par_iter()
            .with_min_len(16)
            .fold(&identity, &fold)
            .reduce(&identity, &reduce)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = &reduce;
        (0..len).fold(identity(), fold)
    }
}

/// Order-preserving parallel map into a `Vec`.
pub fn map_collect<T, M>(len: usize, map: M) -> Vec<T>
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(map).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(map).collect()
    }
}

/// Order-preserving parallel map over a slice.
pub fn map_slice<A, T, M>(items: &[A], map: M) -> Vec<T>
where
    A: Sync,
    T: Send,
    M: Fn(&A) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(map).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(map).collect()
    }
}
