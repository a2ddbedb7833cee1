use serde::{Deserialize, Serialize};

use super::{
    match_frames, precision_recall_f1, workload_estimate, GroundTruth, MatchReport, UnitCosts,
    WorkloadCounts, WorkloadEstimate,
};
use crate::model::Detection;

fn four_places(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

/// Evaluation summary as written by the CLI and returned by the service.
/// Precision, recall and F1 are rounded to four decimal places.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub workload: WorkloadEstimate,
}

impl EvaluationReport {
    pub fn from_match(report: &MatchReport, costs: UnitCosts) -> Self {
        let m = precision_recall_f1(report.tp, report.fp, report.fn_);
        Self {
            tp: report.tp,
            fp: report.fp,
            fn_: report.fn_,
            precision: m.precision.map(four_places),
            recall: m.recall.map(four_places),
            f1: m.f1.map(four_places),
            workload: workload_estimate(WorkloadCounts::from_match_report(report), costs),
        }
    }
}

/// Matches predictions against ground truth and summarises the result.
pub fn evaluate(
    ground_truth: &GroundTruth,
    predictions: &[Detection],
    costs: UnitCosts,
) -> (MatchReport, EvaluationReport) {
    let report = match_frames(ground_truth, predictions);
    let summary = EvaluationReport::from_match(&report, costs);
    (report, summary)
}

/// Adds up per-video match reports. Assignment lists are concatenated.
pub fn merge_reports(reports: impl IntoIterator<Item = MatchReport>) -> MatchReport {
    reports.into_iter().fold(
        MatchReport {
            tp: 0,
            fp: 0,
            fn_: 0,
            assignments: Vec::new(),
        },
        |mut acc, r| {
            acc.tp += r.tp;
            acc.fp += r.fp;
            acc.fn_ += r.fn_;
            acc.assignments.extend(r.assignments);
            acc
        },
    )
}
