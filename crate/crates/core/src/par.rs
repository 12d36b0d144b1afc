//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers fan out over rayon unless the
//! calling thread is inside [`sequential`]. Without the feature they are
//! plain iterator loops. Results never depend on the execution mode.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every helper on this thread forced onto the sequential path.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

#[cfg(feature = "parallel")]
fn parallel_enabled() -> bool {
    !FORCE_SEQUENTIAL.with(|c| c.get())
}

/// True when the helpers will fan out.
pub fn is_parallel() -> bool {
    #[cfg(feature = "parallel")]
    {
        parallel_enabled()
    }
    #[cfg(not(feature = "parallel"))]
    {
        false
    }
}

/// Sets the global worker count. Returns false if the pool was already built
/// or the crate was compiled without the `parallel` feature.
pub fn set_jobs(jobs: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        false
    }
}

/// The smallest index in `lo..hi` for which `f` returns `Some`, with its value.
pub fn find_first<T, F>(lo: u64, hi: u64, f: F) -> Option<(u64, T)>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (lo..hi)
            .into_par_iter()
            .find_map_first(|i| f(i).map(|t| (i, t)));
    }
    (lo..hi).find_map(|i| f(i).map(|t| (i, t)))
}

/// `f` evaluated on `lo..hi`, in index order.
pub fn map_range<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (lo..hi).into_par_iter().map(f).collect();
    }
    (lo..hi).map(f).collect()
}

/// `f` applied to each item of a slice, in order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// True when `f` holds on every index in `lo..hi`.
pub fn all<F>(lo: u64, hi: u64, f: F) -> bool
where
    F: Fn(u64) -> bool + Sync + Send,
{
    find_first(lo, hi, |i| (!f(i)).then_some(())).is_none()
}
