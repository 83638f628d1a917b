//! Data-parallel helpers. With the `parallel` feature these dispatch to rayon;
//! without it they run sequentially on the calling thread.

/// Execution strategy for batch workloads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Falls back to serial execution when the `parallel` feature is disabled.
    #[default]
    Parallel,
}

#[cfg(feature = "parallel")]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    rayon::join(a, b)
}

#[cfg(not(feature = "parallel"))]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    (a(), b())
}

/// Maps `f` over `items`, preserving input order in the output.
pub fn map<T, R, F>(items: &[T], execution: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match execution {
        Execution::Serial => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => items.iter().map(f).collect(),
    }
}
