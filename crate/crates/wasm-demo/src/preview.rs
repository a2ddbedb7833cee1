//! The demo's computations, free of any JS types.

use std::collections::BTreeMap;

use marathon_core::alignment::{compute_timeline, Checkpoint};
use marathon_core::bbox::interpolate_keyframes;
use marathon_core::ingest::{Race, RunnerRecord, SplitDistance};
use marathon_core::model::check_keyframes;
use marathon_core::sampling::{evaluate_subset, read_scores_csv, select_sample_scores, SearchMode};
use marathon_core::KeyframeAnnotation;
use serde::{Deserialize, Serialize};

const LOCATION_SCORES: &str = include_str!("../../../data/location_scores.csv");

/// Totals of the bundled location score table, in table order.
pub fn bundled_scores() -> Vec<u32> {
    read_scores_csv(LOCATION_SCORES.as_bytes())
        .expect("bundled table is valid")
        .iter()
        .map(|s| s.total)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseBox {
    pub frame_index: u32,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub keyframe: bool,
}

pub fn interpolate(keyframes: &[KeyframeAnnotation]) -> Result<Vec<DenseBox>, String> {
    check_keyframes(keyframes).map_err(|e| e.to_string())?;
    Ok(interpolate_keyframes(keyframes)
        .into_iter()
        .map(|(frame_index, b)| DenseBox {
            frame_index,
            bbox: b.to_array(),
            keyframe: keyframes.iter().any(|k| k.frame_index == frame_index),
        })
        .collect())
}

/// Step points `(x, F(x))` of an empirical CDF, one per distinct value.
pub fn ecdf(values: &[u32]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        let point = (f64::from(*v), (i + 1) as f64 / n);
        match out.last_mut() {
            Some(last) if last.0 == point.0 => *last = point,
            _ => out.push(point),
        }
    }
    out
}

fn ecdf_at(curve: &[(f64, f64)], x: f64) -> f64 {
    curve
        .iter()
        .take_while(|p| p.0 <= x)
        .last()
        .map_or(0.0, |p| p.1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsView {
    pub all: Vec<(f64, f64)>,
    pub subset: Vec<(f64, f64)>,
    pub statistic: f64,
    pub critical_value: f64,
    pub accepted: bool,
    /// Score value where the two curves are furthest apart.
    pub widest_at: f64,
}

pub fn ks_explore(all: &[u32], subset: &[u32], c_alpha: f64) -> Result<KsView, String> {
    let ks = evaluate_subset(all, subset, c_alpha).map_err(|e| e.to_string())?;
    let (ca, cs) = (ecdf(all), ecdf(subset));
    let widest_at = ca
        .iter()
        .chain(&cs)
        .map(|p| p.0)
        .map(|x| (x, (ecdf_at(&ca, x) - ecdf_at(&cs, x)).abs()))
        .fold((f64::NAN, -1.0), |best, cur| {
            if cur.1 > best.1 || (cur.1 == best.1 && cur.0 < best.0) {
                cur
            } else {
                best
            }
        })
        .0;
    Ok(KsView {
        all: ca,
        subset: cs,
        statistic: ks.statistic,
        critical_value: ks.critical_value,
        accepted: ks.accepted,
        widest_at,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsSearch {
    pub subset: Vec<u32>,
    pub evaluated: u64,
    pub view: KsView,
}

pub fn ks_search(
    all: &[u32],
    k: usize,
    c_alpha: f64,
    seed: u64,
    iterations: u32,
    exhaustive: bool,
) -> Result<KsSearch, String> {
    let mode = if exhaustive {
        SearchMode::Exhaustive
    } else {
        SearchMode::Random { iterations, seed }
    };
    let sel = select_sample_scores(all, k, c_alpha, mode).map_err(|e| e.to_string())?;
    let view = ks_explore(all, &sel.subset, c_alpha)?;
    Ok(KsSearch {
        subset: sel.subset,
        evaluated: sel.evaluated,
        view,
    })
}

#[derive(Debug, Clone, Deserialize)]
pub struct SplitInput {
    pub km: f64,
    pub seconds: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelinePoint {
    pub location_number: u8,
    pub km: f64,
    pub seconds: f64,
}

/// Passing times at every whole kilometre up to the last split given.
pub fn timeline(splits: &[SplitInput]) -> Result<Vec<TimelinePoint>, String> {
    let mut map: BTreeMap<SplitDistance, u32> = BTreeMap::new();
    for s in splits {
        let d = SplitDistance::from_km(s.km)
            .ok_or_else(|| format!("{} km is not a distance in tenths of a km", s.km))?;
        if map.insert(d, s.seconds).is_some() {
            return Err(format!("{} km given twice", s.km));
        }
    }
    let (last_d, last_t) = map
        .iter()
        .next_back()
        .map(|(d, t)| (*d, *t))
        .ok_or("no splits given")?;
    let race = if last_d <= Race::HalfMarathon.finish_distance() {
        Race::HalfMarathon
    } else {
        Race::FullMarathon
    };
    if last_d > race.finish_distance() {
        return Err(format!("{} km is past the finish", last_d.km()));
    }
    let record = RunnerRecord {
        bib: 0,
        name: String::new(),
        gender: String::new(),
        country_code: String::new(),
        race,
        splits: map,
        finish_time_s: last_t,
    };
    let tl =
        compute_timeline(&record, &Checkpoint::every_kilometre()).map_err(|e| e.to_string())?;
    Ok(tl
        .entries
        .into_iter()
        .map(|e| TimelinePoint {
            location_number: e.location_number,
            km: e.distance_km,
            seconds: e.estimated_passing_s,
        })
        .collect())
}
