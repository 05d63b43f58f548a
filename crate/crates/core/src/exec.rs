//! Sequential or data-parallel evaluation of independent work items.
//!
//! Results always come back in index order, so output does not depend on
//! scheduling or on the number of worker threads.

/// How to evaluate a batch of independent items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon worker pool; `None` uses all available cores.
    #[cfg(feature = "parallel")]
    Parallel {
        jobs: Option<usize>,
    },
}

impl Default for Execution {
    /// All cores when built with `parallel`, otherwise sequential.
    fn default() -> Self {
        Execution::from_jobs(None)
    }
}

impl Execution {
    /// Maps a `--jobs` style setting onto an execution mode.
    ///
    /// One job always runs sequentially. Without the `parallel` feature every
    /// setting does.
    pub fn from_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            Some(0 | 1) => Execution::Sequential,
            #[cfg(feature = "parallel")]
            _ => Execution::Parallel { jobs },
            #[cfg(not(feature = "parallel"))]
            _ => {
                if jobs.is_some() {
                    log::warn!("built without the `parallel` feature; running sequentially");
                }
                Execution::Sequential
            }
        }
    }

    /// `f(0), f(1), …, f(n-1)`, in that order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel { jobs } => {
                use rayon::prelude::*;
                let run = || (0..n).into_par_iter().map(&f).collect();
                match jobs {
                    None => run(),
                    Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
                        Ok(pool) => pool.install(run),
                        Err(e) => {
                            log::warn!("could not start {j} workers ({e}); using the global pool");
                            run()
                        }
                    },
                }
            }
        }
    }
}
