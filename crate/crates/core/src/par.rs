use rayon::{ThreadPool, ThreadPoolBuilder};

/// Environment variable capping the number of worker threads used by sweeps.
pub const THREADS_ENV: &str = "CHRADIAL_THREADS";

/// Worker count: `CHRADIAL_THREADS` if set to a positive integer, otherwise
/// the number of available cores.
pub fn sweep_threads() -> usize {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => n,
        _ => cores,
    }
}

pub(crate) fn pool() -> ThreadPool {
    ThreadPoolBuilder::new()
        .num_threads(sweep_threads())
        .build()
        .expect("thread pool")
}
