//! Index-parallel map with a sequential fallback.
//!
//! Results are always returned in index order, so every reduction done on top
//! of them is independent of the execution mode and of the thread count.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Evaluates `f(0), …, f(n-1)` and returns them in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// Index of the largest value; ties go to the smallest index. NaN never wins.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(j) if values[j] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "RIKIT_THREADS";

/// Parses a `RIKIT_THREADS` value: a positive integer.
pub fn parse_threads(raw: &str) -> crate::Result<usize> {
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(crate::Error::InvalidParameter(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))),
    }
}

/// Sizes the global pool from `RIKIT_THREADS` (default: machine
/// parallelism) and returns the worker count. Only the first call in a
/// process takes effect.
pub fn init_threads() -> crate::Result<usize> {
    let requested = match std::env::var(THREADS_ENV) {
        Ok(raw) => Some(parse_threads(&raw)?),
        Err(_) => None,
    };
    #[cfg(feature = "parallel")]
    {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = requested {
            builder = builder.num_threads(n);
        }
        // A pool that is already built keeps its size.
        let _ = builder.build_global();
        Ok(rayon::current_num_threads())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = requested;
        Ok(1)
    }
}
