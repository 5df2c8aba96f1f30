//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over the current rayon
//! pool; without it, or when the caller opts out, items run in order.

pub(crate) fn map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

pub(crate) fn for_each<T, F>(items: &[T], parallel: bool, f: F)
where
    T: Sync,
    F: Fn(usize, &T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        items.par_iter().enumerate().for_each(|(i, t)| f(i, t));
        return;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    items.iter().enumerate().for_each(|(i, t)| f(i, t));
}

/// Whether this build can run work in parallel at all.
pub const fn available() -> bool {
    cfg!(feature = "parallel")
}
