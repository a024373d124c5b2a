//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) work items are spread over
//! the rayon thread pool; without it every call runs on the current thread.
//! Results are always returned in input order so callers stay deterministic.

/// How to execute an embarrassingly parallel batch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn available(self) -> bool {
        matches!(self, Execution::Parallel) && cfg!(feature = "parallel")
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Execution::Parallel = self {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `items` and folds the results with an associative,
    /// commutative `pick`; `None` for empty input.
    pub fn map_reduce<T, R, F, P>(self, items: &[T], f: F, pick: P) -> Option<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
        P: Fn(R, R) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Execution::Parallel = self {
            use rayon::prelude::*;
            return items.par_iter().map(f).reduce_with(pick);
        }
        items.iter().map(f).reduce(pick)
    }
}
