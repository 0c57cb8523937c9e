//! Command-line front end: JSON scenarios in, CSV/JSON out.

pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod output;
pub mod reproduce;

pub use config::Scenario;
pub use engine::Quantity;
pub use error::{CliError, CliResult};
pub use reproduce::Target;

/// Thread pool honouring `OPTOMECH_THREADS`; rayon's default otherwise.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("OPTOMECH_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("OPTOMECH_THREADS must be a positive integer, got '{v}'")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))
}
