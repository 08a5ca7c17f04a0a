//! File formats, checkpoints and the `jumper` command-line tool built on
//! `jumper-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod io;
pub mod run;

pub use config::{DataConfig, RunConfig};
pub use error::{IoError, IoResult};
pub use exec::RayonExecutor;
pub use io::Checkpoint;
