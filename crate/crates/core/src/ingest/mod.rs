//! Video manifests, frame sequences, runner result tables and dataset statistics.

mod frames;
mod manifest;
mod runners;

use std::path::PathBuf;

use thiserror::Error;

pub use frames::{subsample_indices, FrameSequence, FRAME_LIST_FILE};
pub use manifest::{
    dataset_stats, load_manifest, out_of_frame_boxes, DatasetStats, FrameIssue, VideoMeta,
};
pub use runners::{
    load_runner_csv, read_runner_csv, write_runner_csv, Race, RunnerRecord, SplitDistance,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("bib {0} appears more than once")]
    DuplicateBib(u32),
    #[error("{0} fps does not divide the 30 fps source rate")]
    NonDivisorFps(u32),
    #[error("manifest lists no videos")]
    EmptyManifest,
    #[error("frame list: {0}")]
    FrameList(String),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
