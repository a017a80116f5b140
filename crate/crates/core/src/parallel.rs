//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature (default) `ExecMode::Parallel` runs on the
//! rayon global pool. Without it, both modes run sequentially. Results are
//! always returned in input order, so output never depends on scheduling.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether `Parallel` actually uses threads in this build.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Ordered map over a slice.
pub fn map<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Ordered fallible map; the first error in input order wins.
pub fn try_map<T, R, E, F>(mode: ExecMode, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(mode, items, f).into_iter().collect()
}
