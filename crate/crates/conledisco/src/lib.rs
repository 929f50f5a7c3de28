//! File formats, pipeline stages and run manifests around
//! [`conledisco_core`].

pub mod config;
pub mod error;
pub mod formats;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod synth;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use pipeline::{Pipeline, Stage, StageSummary};
