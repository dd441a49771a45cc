//! Ordered data-parallel map over independent work items.
//!
//! With the `parallel` feature the work is spread over a rayon pool; without
//! it every strategy runs sequentially. Results always come back in input
//! order, so output never depends on scheduling.

use crate::error::{MazerError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon pool; `None` uses the global pool, `Some(n)` a dedicated pool
    /// with `n` workers.
    Parallel { jobs: Option<usize> },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { jobs: None }
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Strategy for a `--jobs` flag: 1 means sequential.
    pub fn with_jobs(jobs: Option<usize>) -> Result<Self> {
        match jobs {
            Some(0) => Err(MazerError::invalid("--jobs must be at least 1")),
            Some(1) => Ok(Execution::Sequential),
            jobs => Ok(Execution::Parallel { jobs }),
        }
    }

    /// `f` over `items`, in order. The first failure in input order wins.
    pub fn try_map<T, R, F>(self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            Execution::Parallel { jobs } => parallel_map(items, f, jobs),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], f: F, jobs: Option<usize>) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;

    let run = || items.par_iter().map(&f).collect::<Vec<_>>();
    let results = match jobs {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| MazerError::invalid(format!("cannot start {n} workers: {e}")))?
            .install(run),
    };
    results.into_iter().collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], f: F, _jobs: Option<usize>) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    items.iter().map(f).collect()
}
