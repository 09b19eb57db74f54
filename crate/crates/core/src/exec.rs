//! Trial scheduling.
//!
//! Monte-Carlo experiments are lists of independent trials, each with a seed
//! derived from `(master seed, trial index)`. [`Execution`] maps a closure over
//! trial indices either on the rayon pool (feature `parallel`) or on the
//! calling thread. Results always come back in trial-index order, so both
//! modes produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn map<T, F>(self, trials: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..trials).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..trials).into_par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => (0..trials).map(f).collect(),
        }
    }
}
