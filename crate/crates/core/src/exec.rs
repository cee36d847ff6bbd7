//! Execution mode for the data-parallel loops (sweeps, random draws, grid
//! quadrature).
//!
//! With the `parallel` feature (default) the work is spread over the rayon
//! pool; without it every mode runs sequentially. Results never depend on
//! the mode: maps preserve input order and reductions sum fixed-size chunks
//! in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for ordered parallel reductions.
pub const REDUCE_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// True if this mode actually runs on the thread pool in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map_slice<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<U, F>(mode: ExecMode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Sums `f(i)` over `0..n` with a summation order independent of the mode.
///
/// Each chunk of [`REDUCE_CHUNK`] indices is summed left to right and the
/// chunk partials are then added in chunk order, so sequential and parallel
/// runs agree bit for bit.
pub fn ordered_sum<T, F>(mode: ExecMode, n: usize, zero: T, f: F) -> T
where
    T: Copy + Send + Sync + std::ops::Add<Output = T>,
    F: Fn(usize) -> T + Sync + Send,
{
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partial = |c: usize| {
        let start = c * REDUCE_CHUNK;
        let end = (start + REDUCE_CHUNK).min(n);
        (start..end).fold(zero, |acc, i| acc + f(i))
    };
    map_range(mode, chunks, partial)
        .into_iter()
        .fold(zero, |acc, p| acc + p)
}
