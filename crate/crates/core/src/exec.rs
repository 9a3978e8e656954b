//! Execution strategy for the data-parallel loops. Without the `parallel`
//! feature every strategy runs sequentially.

use std::cmp::Ordering;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

impl Strategy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

pub fn sort_by<T, F>(items: &mut [T], cmp: F, strategy: Strategy)
where
    T: Send,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        items.par_sort_unstable_by(cmp);
        return;
    }
    let _ = strategy;
    items.sort_unstable_by(cmp);
}

/// Maps every item to a batch of results and concatenates the batches in
/// input order.
pub fn flat_map<T, R, F>(items: &[T], f: F, strategy: Strategy) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return items.par_iter().flat_map_iter(f).collect();
    }
    let _ = strategy;
    items.iter().flat_map(f).collect()
}

/// Folds every item into an accumulator and merges the per-worker
/// accumulators. `merge` must be associative and commutative for the result
/// to be independent of the strategy.
pub fn map_reduce<T, A, F, M>(items: &[T], init: A, f: F, merge: M, strategy: Strategy) -> A
where
    T: Sync,
    A: Clone + Send + Sync,
    F: Fn(&T) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return items.par_iter().map(&f).reduce(|| init.clone(), &merge);
    }
    let _ = strategy;
    items.iter().map(f).fold(init, merge)
}
