//! Binary file formats and runtime support for the command-line tool.

pub mod codec;

use std::time::Instant;

/// Wall-clock nanoseconds for harness timing reports.
pub struct StdClock {
    origin: Instant,
}

impl StdClock {
    pub fn new() -> Self {
        StdClock {
            origin: Instant::now(),
        }
    }
}

impl Default for StdClock {
    fn default() -> Self {
        StdClock::new()
    }
}

impl sgsig_core::Clock for StdClock {
    fn nanos(&mut self) -> u64 {
        self.origin.elapsed().as_nanos() as u64
    }
}
