//! Front end of the `bbk` binary: configuration files, scan grids and verification suites.

pub mod config;
pub mod grid;
pub mod scan;
pub mod suites;

use anyhow::{Context, Result};

/// Thread pool capped by `BBK_THREADS` when that variable is set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("BBK_THREADS") {
        let threads: usize = text
            .trim()
            .parse()
            .with_context(|| format!("BBK_THREADS must be a positive integer, got {text:?}"))?;
        anyhow::ensure!(threads > 0, "BBK_THREADS must be a positive integer, got 0");
        builder = builder.num_threads(threads);
    }
    Ok(builder.build()?)
}
