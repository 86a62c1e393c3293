//! Data-parallel helpers. With the `parallel` feature they run on rayon;
//! without it they fall back to plain iterators with identical results.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Routes every helper through the sequential path, even when built with
/// `parallel`. Results do not change, only the schedule.
pub fn force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

#[cfg(feature = "parallel")]
fn use_rayon() -> bool {
    !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Maps every item, keeping input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if use_rayon() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Maps over `0..n`, keeping index order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if use_rayon() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// First index (in increasing order) whose result is `Some`.
pub fn find_first<R, F>(n: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if use_rayon() {
        return (0..n).into_par_iter().find_map_first(f);
    }
    (0..n).find_map(f)
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}
