//! Data-parallel fan-out with a sequential fallback.
//!
//! Everything compute-heavy in this crate is an independent map over
//! agent or run indices. With the `parallel` feature (default) the map
//! runs on rayon; without it, on a plain iterator. Both paths are always
//! observationally identical because callers derive all randomness from
//! index-keyed substreams.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sequential reference implementation, always available (the benchmark
/// suite compares it against the rayon path).
pub fn map_indexed_seq<T>(count: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..count).map(f).collect()
}

/// Maps `f` over `0..count`, in parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..count).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..count`, in parallel when the feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T>(count: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    map_indexed_seq(count, f)
}

/// Honors the `MMWALBP_WORKERS` variable when a worker count was not
/// already fixed. No-op on sequential builds or when unset/invalid.
pub fn init_workers_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(v) = std::env::var("MMWALBP_WORKERS") {
            if let Ok(n) = v.parse::<usize>() {
                if n > 0 {
                    // fails harmlessly if a global pool already exists
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    }
}
