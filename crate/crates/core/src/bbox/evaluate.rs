use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::interpolate::DenseTrack;
use super::EngineError;
use crate::model::{AnnotationDocument, BoundingBox, Detection, Identity};

/// A prediction counts as a true positive from this IoU upwards (inclusive).
pub const TP_IOU_THRESHOLD: f64 = 0.8;

/// Intersection over union; 0 for boxes that do not overlap.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    match a.intersection(b) {
        None => 0.0,
        Some(overlap) => {
            let inter = overlap.area();
            inter / (a.area() + b.area() - inter)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Tp,
    Fp,
    Fn,
}

pub fn classify(iou_value: f64, detected: bool) -> Verdict {
    match (detected, iou_value >= TP_IOU_THRESHOLD) {
        (false, _) => Verdict::Fn,
        (true, true) => Verdict::Tp,
        (true, false) => Verdict::Fp,
    }
}

/// Reference boxes per frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    frames: BTreeMap<u32, Vec<(Identity, BoundingBox)>>,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, frame_index: u32, identity: Identity, bbox: BoundingBox) {
        self.frames
            .entry(frame_index)
            .or_default()
            .push((identity, bbox));
    }

    pub fn from_dense<'a>(tracks: impl IntoIterator<Item = (Identity, &'a DenseTrack)>) -> Self {
        let mut gt = Self::new();
        for (id, dense) in tracks {
            for (&f, &b) in dense {
                gt.insert(f, id, b);
            }
        }
        gt
    }

    /// Densifies every track of the document.
    pub fn from_document(doc: &AnnotationDocument) -> Self {
        let dense = super::densify_document(doc);
        Self::from_dense(dense.iter().map(|(id, d)| (*id, d)))
    }

    pub fn frames(&self) -> impl Iterator<Item = (u32, &[(Identity, BoundingBox)])> {
        self.frames.iter().map(|(f, v)| (*f, v.as_slice()))
    }

    pub fn box_count(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }

    pub fn restrict_to(&self, identity: Identity) -> Self {
        let mut gt = Self::new();
        for (&f, boxes) in &self.frames {
            for &(id, b) in boxes.iter().filter(|(id, _)| *id == identity) {
                gt.insert(f, id, b);
            }
        }
        gt
    }
}

/// One greedy pairing of a prediction with a reference box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub frame_index: u32,
    pub ground_truth: Identity,
    /// Position of the prediction in the input list.
    pub prediction_index: usize,
    pub iou: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub assignments: Vec<Assignment>,
}

impl MatchReport {
    /// Paired predictions whose overlap fell short of the TP threshold.
    pub fn below_threshold_pairs(&self) -> u64 {
        self.assignments
            .iter()
            .filter(|a| a.verdict == Verdict::Fp)
            .count() as u64
    }
}

/// Per frame, pairs predictions with reference boxes greedily by
/// descending IoU (only overlapping pairs, one-to-one).
///
/// A pair at or above the threshold is a TP. A pair below it is an FP for
/// the prediction and an FN for the reference box. Unpaired predictions are
/// FPs and unpaired reference boxes FNs, so `tp + fp` is the prediction
/// count and `tp + fn` the reference count.
pub fn match_frames(ground_truth: &GroundTruth, predictions: &[Detection]) -> MatchReport {
    let mut preds_by_frame: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, p) in predictions.iter().enumerate() {
        preds_by_frame.entry(p.frame_index).or_default().push(i);
    }

    let mut report = MatchReport {
        tp: 0,
        fp: 0,
        fn_: 0,
        assignments: Vec::new(),
    };
    let empty = Vec::new();
    let frames: std::collections::BTreeSet<u32> = ground_truth
        .frames
        .keys()
        .chain(preds_by_frame.keys())
        .copied()
        .collect();

    for frame in frames {
        let gts = ground_truth.frames.get(&frame).unwrap_or(&empty);
        let preds = preds_by_frame.get(&frame).map_or(&[][..], Vec::as_slice);

        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for (gi, (_, gb)) in gts.iter().enumerate() {
            for (pi, &p) in preds.iter().enumerate() {
                let v = iou(gb, &predictions[p].bbox);
                if v > 0.0 {
                    candidates.push((v, gi, pi));
                }
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut gt_used = vec![false; gts.len()];
        let mut pred_used = vec![false; preds.len()];
        for (v, gi, pi) in candidates {
            if gt_used[gi] || pred_used[pi] {
                continue;
            }
            gt_used[gi] = true;
            pred_used[pi] = true;
            let verdict = classify(v, true);
            match verdict {
                Verdict::Tp => report.tp += 1,
                _ => {
                    report.fp += 1;
                    report.fn_ += 1;
                }
            }
            report.assignments.push(Assignment {
                frame_index: frame,
                ground_truth: gts[gi].0,
                prediction_index: preds[pi],
                iou: v,
                verdict,
            });
        }
        report.fp += pred_used.iter().filter(|u| !**u).count() as u64;
        report.fn_ += gt_used.iter().filter(|u| !**u).count() as u64;
    }
    report
}

/// Precision, recall and F1. A metric whose denominator is zero is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn precision_recall_f1(tp: u64, fp: u64, fn_: u64) -> Metrics {
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = precision.zip(recall).map(|(p, r)| f1_score(p, r));
    Metrics {
        precision,
        recall,
        f1,
    }
}

/// Manual corrections needed to turn predictions into the reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadCounts {
    /// False positives deleted.
    pub removals: u64,
    /// Missed runners drawn from scratch.
    pub additions: u64,
    /// Boxes dragged into place.
    pub adjustments: u64,
    /// Identity labels typed in.
    pub labels: u64,
}

impl WorkloadCounts {
    /// Reads corrections off a match report: unpaired predictions are
    /// removed, unpaired reference boxes added, below-threshold pairs
    /// adjusted, and every kept box labelled.
    pub fn from_match_report(report: &MatchReport) -> Self {
        let adjustments = report.below_threshold_pairs();
        Self {
            removals: report.fp - adjustments,
            additions: report.fn_ - adjustments,
            adjustments,
            labels: report.tp + adjustments,
        }
    }
}

/// Seconds per manual action. The defaults are placeholders for planning,
/// not measured values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCosts", into = "RawCosts")]
pub struct UnitCosts {
    removal_s: f64,
    addition_s: f64,
    adjustment_s: f64,
    label_s: f64,
}

#[derive(Serialize, Deserialize)]
struct RawCosts {
    removal_s: f64,
    addition_s: f64,
    adjustment_s: f64,
    label_s: f64,
}

impl TryFrom<RawCosts> for UnitCosts {
    type Error = String;

    fn try_from(r: RawCosts) -> Result<Self, Self::Error> {
        UnitCosts::new(r.removal_s, r.addition_s, r.adjustment_s, r.label_s)
    }
}

impl From<UnitCosts> for RawCosts {
    fn from(c: UnitCosts) -> Self {
        RawCosts {
            removal_s: c.removal_s,
            addition_s: c.addition_s,
            adjustment_s: c.adjustment_s,
            label_s: c.label_s,
        }
    }
}

impl Default for UnitCosts {
    fn default() -> Self {
        Self {
            removal_s: 3.0,
            addition_s: 8.0,
            adjustment_s: 6.0,
            label_s: 2.0,
        }
    }
}

impl UnitCosts {
    pub fn new(
        removal_s: f64,
        addition_s: f64,
        adjustment_s: f64,
        label_s: f64,
    ) -> Result<Self, String> {
        let all = [removal_s, addition_s, adjustment_s, label_s];
        if all.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(format!(
                "unit costs must be finite and non-negative, got {all:?}"
            ));
        }
        Ok(Self {
            removal_s,
            addition_s,
            adjustment_s,
            label_s,
        })
    }

    pub fn removal_s(&self) -> f64 {
        self.removal_s
    }

    pub fn addition_s(&self) -> f64 {
        self.addition_s
    }

    pub fn adjustment_s(&self) -> f64 {
        self.adjustment_s
    }

    pub fn label_s(&self) -> f64 {
        self.label_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadEstimate {
    pub counts: WorkloadCounts,
    pub unit_costs: UnitCosts,
    pub removal_s: f64,
    pub addition_s: f64,
    pub adjustment_s: f64,
    pub label_s: f64,
    pub total_s: f64,
}

pub fn workload_estimate(counts: WorkloadCounts, unit_costs: UnitCosts) -> WorkloadEstimate {
    let removal_s = counts.removals as f64 * unit_costs.removal_s;
    let addition_s = counts.additions as f64 * unit_costs.addition_s;
    let adjustment_s = counts.adjustments as f64 * unit_costs.adjustment_s;
    let label_s = counts.labels as f64 * unit_costs.label_s;
    WorkloadEstimate {
        counts,
        unit_costs,
        removal_s,
        addition_s,
        adjustment_s,
        label_s,
        total_s: removal_s + addition_s + adjustment_s + label_s,
    }
}

/// Percentage of runners left without an aligned identity.
pub fn unidentified_rate(total: u64, identified: u64) -> Result<f64, EngineError> {
    if total == 0 {
        return Err(EngineError::ZeroTotal);
    }
    if identified > total {
        return Err(EngineError::IdentifiedExceedsTotal { identified, total });
    }
    Ok((total - identified) as f64 / total as f64 * 100.0)
}
