//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) work runs on the rayon pool;
//! without it, or with [`ExecMode::Sequential`], items run in order on the
//! calling thread. Results are always returned in input order.

use serde::{Deserialize, Serialize};

/// Environment variable capping the size of the global work pool.
pub const THREADS_ENV: &str = "EULER_SPEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecMode::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

/// Sizes the global rayon pool from [`THREADS_ENV`], if set. Returns the
/// requested thread count. A no-op without the `parallel` feature.
pub fn init_thread_pool_from_env() -> Option<usize> {
    let threads: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok()?;
    if threads == 0 {
        return None;
    }
    #[cfg(feature = "parallel")]
    {
        // already-initialized pools are left alone
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Some(threads)
}
