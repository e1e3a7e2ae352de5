//! IO, experiment harness, verification suites and the `degproc` command line.

pub mod error;
pub mod experiments;
pub mod formats;
pub mod harness;
pub mod verify;

pub use error::{LabError, Result};
