//! Worker-pool sizing shared by the parallel searches.

use crate::error::{Error, Result};

/// Environment variable that caps the number of worker threads.
pub const THREADS_ENV: &str = "UGAME_THREADS";

/// Reads [`THREADS_ENV`]; unset or empty means "no cap".
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Parse(format!("{THREADS_ENV}={s} is not a positive integer"))),
        },
        _ => Ok(None),
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn run_with_threads<R, F>(threads: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
