//! Host-side companion to [`critquench_core`]: a brute-force exact
//! diagonalization oracle, parallel drives and parameter scans, CSV/JSON
//! formats and the `critquench` command line.

pub mod config;
pub mod error;
pub mod io;
pub mod oracle;
pub mod parallel;
pub mod scan;

pub use error::{Error, Result};
