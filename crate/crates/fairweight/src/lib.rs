//! File formats, configuration and subcommands around `fairweight-core`.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod docs;
pub mod error;
pub mod table;

pub use error::{Error, Result};

/// Wall-clock time since construction.
pub struct WallClock(std::time::Instant);

impl WallClock {
    pub fn start() -> Self {
        Self(std::time::Instant::now())
    }
}

impl fairweight_core::trainer::Clock for WallClock {
    fn elapsed(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
