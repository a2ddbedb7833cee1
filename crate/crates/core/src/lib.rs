//! Annotation engine for multi-camera marathon footage.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`model`] holds the geometry, identity and annotation-document types shared by everything else.
//! * [`ingest`] loads video manifests, frame sequences and runner result CSVs.
//! * [`sampling`] scores recording locations and picks a representative subset with a two-sample KS test.
//! * [`bbox`] densifies keyframe tracks, links cursor paths to detections and evaluates annotations.
//! * [`alignment`] estimates runner passing times per camera location and answers identity queries.

pub mod alignment;
pub mod bbox;
pub mod ingest;
pub mod model;
pub mod sampling;

pub use model::{
    AnnotationDocument, BoundingBox, Detection, FrameRangeAnnotation, FrameRef, Identity,
    KeyframeAnnotation, ModelError, PathPoint, Track,
};

/// Frame rate every source video is recorded at.
pub const SOURCE_FPS: u32 = 30;

/// Number of recording locations along the course.
pub const LOCATION_COUNT: u8 = 42;
