//! Geometry, identities and the on-disk annotation formats.

mod annotation;
mod clock;
mod geometry;
mod identity;

use thiserror::Error;

pub use annotation::{
    check_keyframes, AnnotationDocument, Detection, FrameRangeAnnotation, FrameRef,
    KeyframeAnnotation, Track,
};
pub use clock::{format_clock_time, parse_clock_time};
pub use geometry::{BoundingBox, PathPoint};
pub use identity::Identity;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(
        "degenerate box ({x_min}, {y_min}, {x_max}, {y_max}): min must be below max on both axes"
    )]
    DegenerateBox {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
    #[error("negative pixel coordinate")]
    NegativeCoordinate,
    #[error("non-finite pixel coordinate")]
    NonFiniteCoordinate,
    #[error("malformed clock time {0:?}")]
    MalformedTime(String),
    #[error("invalid identity: {0}")]
    InvalidIdentity(String),
    #[error("track has no keyframes")]
    EmptyTrack,
    #[error("keyframes out of order: frame {next} follows frame {previous}")]
    UnorderedKeyframes { previous: u32, next: u32 },
    #[error("frame range starts at {start_frame} after it ends at {end_frame}")]
    InvertedRange { start_frame: u32, end_frame: u32 },
    #[error("confidence {0} outside [0, 1]")]
    ConfidenceOutOfRange(f64),
    #[error("frame {frame_index} out of range for a video of {frame_count} frames")]
    FrameOutOfRange { frame_index: u32, frame_count: u32 },
    #[error("annotation belongs to video {found:?}, expected {expected:?}")]
    VideoMismatch { expected: String, found: String },
    #[error("identity {0} annotated twice in one video")]
    DuplicateIdentity(Identity),
    #[error("source fps {0} is not supported, expected 30")]
    UnsupportedFps(u32),
}
