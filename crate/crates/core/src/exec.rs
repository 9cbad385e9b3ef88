//! Deterministic block-parallel folds.
//!
//! Work is cut into fixed-size blocks of replicate indices. Each block is
//! folded sequentially and block results are merged in index order, so the
//! outcome does not depend on how many workers ran the blocks.

use crate::error::Result;

pub const DEFAULT_BLOCK: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Runs blocks on a dedicated pool of `workers` threads. Falls back to
    /// sequential execution when built without the `parallel` feature.
    Parallel { workers: usize },
}

impl Execution {
    pub fn with_workers(workers: usize) -> Self {
        if workers <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { workers }
        }
    }

    pub fn workers(&self) -> usize {
        match *self {
            Execution::Sequential => 1,
            Execution::Parallel { workers } => workers,
        }
    }
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel { workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1) }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

/// Folds `n` items in blocks of `block`; `run(start, end)` handles one block
/// and `merge` combines block results left to right.
pub fn fold_blocks<A, R, M>(exec: Execution, n: u64, block: u64, run: R, mut merge: M) -> Result<Option<A>>
where
    A: Send,
    R: Fn(u64, u64) -> Result<A> + Sync,
    M: FnMut(A, A) -> A,
{
    let block = block.max(1);
    let blocks = n.div_ceil(block);
    let bounds = |k: u64| (k * block, ((k + 1) * block).min(n));
    let parts: Vec<Result<A>> = match exec {
        Execution::Sequential => (0..blocks).map(|k| { let (a, b) = bounds(k); run(a, b) }).collect(),
        Execution::Parallel { workers } => run_parallel(workers, blocks, &|k| { let (a, b) = bounds(k); run(a, b) })?,
    };
    let mut acc: Option<A> = None;
    for p in parts {
        let p = p?;
        acc = Some(match acc {
            None => p,
            Some(a) => merge(a, p),
        });
    }
    Ok(acc)
}

#[cfg(feature = "parallel")]
fn run_parallel<A: Send>(workers: usize, blocks: u64, job: &(dyn Fn(u64) -> Result<A> + Sync)) -> Result<Vec<Result<A>>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| crate::error::Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..blocks).into_par_iter().map(job).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<A: Send>(_workers: usize, blocks: u64, job: &(dyn Fn(u64) -> Result<A> + Sync)) -> Result<Vec<Result<A>>> {
    Ok((0..blocks).map(job).collect())
}
