//! Cross-camera identity alignment: runner timelines from split times,
//! dashboard queries, fallback identities and re-id gallery ranking.

mod query;
mod reid;
mod timeline;
mod unique_id;

use thiserror::Error;

pub use query::{partial_search, search_runners, time_window_query, DEFAULT_WINDOW_S};
pub use reid::{
    baseline_embed, crop_and_embed, embed_rgb, load_gallery, reid_rank, GalleryImage, RankedMatch,
    DEFAULT_TOP_K, EMBEDDING_LEN,
};
pub use timeline::{
    compute_timeline, load_checkpoints_csv, read_checkpoints_csv, segment_speed,
    write_timelines_csv, Checkpoint, Timeline, TimelineEntry,
};
pub use unique_id::UniqueIdCounter;

#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("split at {d_j} km / {t_j} s does not follow {d_i} km / {t_i} s")]
    NonMonotoneSplit {
        d_i: f64,
        t_i: f64,
        d_j: f64,
        t_j: f64,
    },
    #[error("runner {bib} has fewer than two recorded splits")]
    InsufficientSplits { bib: u32 },
    #[error("location {0} outside 1..=42")]
    UnknownLocation(u8),
    #[error("time window must be finite with a non-negative half-width")]
    InvalidWindow,
    #[error("search fragment is empty")]
    EmptyFragment,
    #[error("feature has {found} dimensions, gallery uses {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gallery is empty")]
    EmptyGallery,
    #[error("cannot decode image: {0}")]
    UndecodableImage(String),
    #[error("crop box covers no pixel of a {width}x{height} image")]
    EmptyCrop { width: u32, height: u32 },
    #[error("checkpoint table: {0}")]
    InvalidCheckpoint(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("gallery file: {0}")]
    Gallery(String),
}

impl AlignmentError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
