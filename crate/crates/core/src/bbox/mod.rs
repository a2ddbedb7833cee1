//! Keyframe densification, path-to-detection linking and annotation metrics.

mod evaluate;
mod interpolate;
mod link;
mod report;

pub use evaluate::{
    classify, f1_score, iou, match_frames, precision_recall_f1, unidentified_rate,
    workload_estimate, Assignment, GroundTruth, MatchReport, Metrics, UnitCosts, Verdict,
    WorkloadCounts, WorkloadEstimate, TP_IOU_THRESHOLD,
};
pub use interpolate::{densify_document, interpolate_keyframes, interpolate_track, DenseTrack};
pub use link::{link_paths_to_detections, AmbiguousLink, LinkResult, Paths};
pub use report::{evaluate, merge_reports, EvaluationReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("total runner count is zero")]
    ZeroTotal,
    #[error("identified count {identified} exceeds total {total}")]
    IdentifiedExceedsTotal { identified: u64, total: u64 },
}
