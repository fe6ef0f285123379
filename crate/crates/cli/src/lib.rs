//! Library surface of the experiment runner: configuration, verification
//! checks, and output records. The `ymloop` binary is a thin dispatcher
//! over these; the acceptance suite drives them directly.

pub mod checks;
pub mod config;
pub mod report;
