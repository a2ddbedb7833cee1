use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::model::{Detection, Identity, PathPoint};

/// Cursor traces per runner.
pub type Paths = BTreeMap<Identity, Vec<PathPoint>>;

/// A detection hit by more than one runner's trace on the same frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousLink {
    /// Position of the detection in the input list.
    pub input_index: usize,
    pub frame_index: u32,
    pub identities: Vec<Identity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkResult {
    /// Surviving detections in input order. Unambiguous ones carry their
    /// runner's identity; ambiguous ones are kept unlabelled.
    pub detections: Vec<Detection>,
    pub ambiguous: Vec<AmbiguousLink>,
}

/// Keeps a detection iff some trace point of its frame lies inside or on
/// its box, and labels it with that trace's runner.
pub fn link_paths_to_detections(paths: &Paths, detections: &[Detection]) -> LinkResult {
    let mut by_frame: HashMap<u32, Vec<(Identity, &PathPoint)>> = HashMap::new();
    for (id, points) in paths {
        for p in points {
            by_frame.entry(p.frame_index).or_default().push((*id, p));
        }
    }

    let mut out = LinkResult {
        detections: Vec::new(),
        ambiguous: Vec::new(),
    };
    for (input_index, det) in detections.iter().enumerate() {
        let hits: BTreeSet<Identity> = by_frame
            .get(&det.frame_index)
            .into_iter()
            .flatten()
            .filter(|(_, p)| det.bbox.contains_point(p.x(), p.y()))
            .map(|(id, _)| *id)
            .collect();
        match hits.len() {
            0 => {}
            1 => out
                .detections
                .push(det.clone().labelled(hits.first().copied())),
            _ => {
                out.detections.push(det.clone().labelled(None));
                out.ambiguous.push(AmbiguousLink {
                    input_index,
                    frame_index: det.frame_index,
                    identities: hits.into_iter().collect(),
                });
            }
        }
    }
    out
}
