//! Configuration, artifacts and command line around `raceway-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod sampler;
pub mod sweep;

pub use config::RunConfig;
pub use error::{ConfigError, Error, Result};
pub use output::TopographyDump;
pub use sampler::ShapeSampler;
