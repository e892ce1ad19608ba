//! Staged command-line pipeline: ingest, communities, cycles, paths,
//! embeddings, centralities, scoring and the final report.

pub mod analysis;
pub mod artifacts;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, Stage, Workspace};
