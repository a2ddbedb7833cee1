//! Recording-location scores and KS-matched selection of a representative
//! subset of locations.
//!
//! Each location gets five difficulty sub-scores in `1..=5`; its total is
//! their sum. A subset of distinct total values is accepted as representative
//! when the two-sample KS distance between the subset and all totals is below
//! the large-sample critical value `c(alpha) * sqrt((n1 + n2) / (n1 * n2))`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::LOCATION_COUNT;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("{field} score {value} outside 1..=5")]
    ComponentOutOfRange { field: &'static str, value: u8 },
    #[error("location {0} outside 1..=42")]
    InvalidLocation(u8),
    #[error("location {location}: listed score {listed} but components sum to {computed}")]
    ScoreMismatch {
        location: u8,
        listed: u32,
        computed: u32,
    },
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
    #[error("cannot pick {k} distinct scores from {available}")]
    InsufficientDistinctScores { k: usize, available: usize },
    #[error("subset size must be at least 1")]
    EmptySubset,
    #[error("iteration budget must be at least 1")]
    NoIterations,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// The five sub-scores of a recording location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreComponents {
    pub lighting: u8,
    pub resolution: u8,
    pub recording_angle: u8,
    pub occlusion: u8,
    pub crowded_videos: u8,
}

impl ScoreComponents {
    fn named(&self) -> [(&'static str, u8); 5] {
        [
            ("lighting", self.lighting),
            ("resolution", self.resolution),
            ("recording_angle", self.recording_angle),
            ("occlusion", self.occlusion),
            ("crowded_videos", self.crowded_videos),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationScore {
    pub location_number: u8,
    #[serde(flatten)]
    pub components: ScoreComponents,
    pub total: u32,
}

pub fn location_score(
    location_number: u8,
    components: ScoreComponents,
) -> Result<LocationScore, SamplingError> {
    if !(1..=LOCATION_COUNT).contains(&location_number) {
        return Err(SamplingError::InvalidLocation(location_number));
    }
    for (field, value) in components.named() {
        if !(1..=5).contains(&value) {
            return Err(SamplingError::ComponentOutOfRange { field, value });
        }
    }
    let total = components.named().iter().map(|(_, v)| u32::from(*v)).sum();
    Ok(LocationScore {
        location_number,
        components,
        total,
    })
}

#[derive(Deserialize)]
struct ScoreRow {
    location: u8,
    occlusion: u8,
    lighting: u8,
    recording_angle: u8,
    resolution: u8,
    crowded_videos: u8,
    score: u32,
}

pub fn load_scores_csv(path: impl AsRef<Path>) -> Result<Vec<LocationScore>, SamplingError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| SamplingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_scores_csv(file)
}

/// Reads `location,occlusion,lighting,recording_angle,resolution,crowded_videos,score`
/// rows, checking each listed score against its components.
pub fn read_scores_csv(input: impl Read) -> Result<Vec<LocationScore>, SamplingError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = Vec::new();
    for row in reader.deserialize::<ScoreRow>() {
        let row = row?;
        let score = location_score(
            row.location,
            ScoreComponents {
                lighting: row.lighting,
                resolution: row.resolution,
                recording_angle: row.recording_angle,
                occlusion: row.occlusion,
                crowded_videos: row.crowded_videos,
            },
        )?;
        if score.total != row.score {
            return Err(SamplingError::ScoreMismatch {
                location: row.location,
                listed: row.score,
                computed: score.total,
            });
        }
        out.push(score);
    }
    Ok(out)
}

/// KS distance kept as the exact fraction `numerator / (n1 * n2)`, so
/// candidate subsets compare without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct KsDistance {
    numerator: u64,
    denominator: u64,
}

impl KsDistance {
    fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl Ord for KsDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = u128::from(self.numerator) * u128::from(other.denominator);
        let rhs = u128::from(other.numerator) * u128::from(self.denominator);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for KsDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sup-distance between the right-continuous empirical CDFs of two sorted
/// samples. Walks both samples once; at every breakpoint the gap is
/// `|i/n - j/m|`, compared as `|i*m - j*n|`.
fn ks_distance_sorted<T: PartialOrd + Copy>(a: &[T], b: &[T]) -> KsDistance {
    let (n, m) = (a.len() as u64, b.len() as u64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0u64;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as u64 * m).abs_diff(j as u64 * n));
    }
    // once either sample is exhausted the remaining gap only shrinks
    KsDistance {
        numerator: best,
        denominator: n * m,
    }
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(sample_a: &[f64], sample_b: &[f64]) -> Result<f64, SamplingError> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(SamplingError::EmptySample);
    }
    if sample_a.iter().chain(sample_b).any(|v| !v.is_finite()) {
        return Err(SamplingError::NonFiniteSample);
    }
    let mut a = sample_a.to_vec();
    let mut b = sample_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(ks_distance_sorted(&a, &b).value())
}

/// Large-sample critical value `c_alpha * sqrt((n1 + n2) / (n1 * n2))`.
pub fn ks_critical_value(n1: usize, n2: usize, c_alpha: f64) -> f64 {
    let (n1, n2) = (n1 as f64, n2 as f64);
    c_alpha * ((n1 + n2) / (n1 * n2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value: f64,
    /// `statistic < critical_value`: the subset is distributed like the full set.
    pub accepted: bool,
}

impl KsResult {
    fn new(statistic: f64, critical_value: f64) -> Self {
        Self {
            statistic,
            critical_value,
            accepted: statistic < critical_value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Seeded random k-subsets, `iterations` draws.
    Random { iterations: u32, seed: u64 },
    /// Every k-subset of the distinct values.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSelection {
    /// Chosen score values, ascending.
    pub subset: Vec<u32>,
    pub ks: KsResult,
    /// Number of candidate subsets evaluated.
    pub evaluated: u64,
}

fn distinct_sorted(all_scores: &[u32]) -> Vec<u32> {
    all_scores
        .iter()
        .copied()
        .sorted_unstable()
        .dedup()
        .collect()
}

/// Scores a fixed subset of score values against all scores.
pub fn evaluate_subset(
    all_scores: &[u32],
    subset: &[u32],
    c_alpha: f64,
) -> Result<KsResult, SamplingError> {
    if all_scores.is_empty() || subset.is_empty() {
        return Err(SamplingError::EmptySample);
    }
    let mut all = all_scores.to_vec();
    let mut sub = subset.to_vec();
    all.sort_unstable();
    sub.sort_unstable();
    let d = ks_distance_sorted(&sub, &all).value();
    Ok(KsResult::new(
        d,
        ks_critical_value(all.len(), sub.len(), c_alpha),
    ))
}

/// Picks `k` distinct score values whose distribution is closest (in KS
/// distance) to `all_scores`.
///
/// Ties go to the lexicographically smallest subset, so the result does not
/// depend on evaluation order.
pub fn select_sample_scores(
    all_scores: &[u32],
    k: usize,
    c_alpha: f64,
    mode: SearchMode,
) -> Result<SampleSelection, SamplingError> {
    if k == 0 {
        return Err(SamplingError::EmptySubset);
    }
    let distinct = distinct_sorted(all_scores);
    if k > distinct.len() {
        return Err(SamplingError::InsufficientDistinctScores {
            k,
            available: distinct.len(),
        });
    }
    let mut all = all_scores.to_vec();
    all.sort_unstable();

    let mut best: Option<(KsDistance, Vec<u32>)> = None;
    let mut evaluated = 0u64;
    let mut consider = |subset: Vec<u32>| {
        evaluated += 1;
        let d = ks_distance_sorted(&subset, &all);
        let better = match &best {
            None => true,
            Some((bd, bs)) => (d, &subset) < (*bd, bs),
        };
        if better {
            best = Some((d, subset));
        }
    };

    match mode {
        SearchMode::Exhaustive => {
            for combo in distinct.iter().copied().combinations(k) {
                consider(combo);
            }
        }
        SearchMode::Random { iterations, seed } => {
            if iterations == 0 {
                return Err(SamplingError::NoIterations);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..iterations {
                let mut picks = rand::seq::index::sample(&mut rng, distinct.len(), k).into_vec();
                picks.sort_unstable();
                consider(picks.into_iter().map(|i| distinct[i]).collect());
            }
        }
    }

    let (d, subset) = best.expect("at least one candidate evaluated");
    Ok(SampleSelection {
        subset,
        ks: KsResult::new(d.value(), ks_critical_value(all.len(), k, c_alpha)),
        evaluated,
    })
}

/// Maps each chosen score value to the lowest-numbered location having it.
pub fn locations_for_scores(scores: &[LocationScore], subset: &[u32]) -> Vec<Option<u8>> {
    let mut lowest: BTreeMap<u32, u8> = BTreeMap::new();
    for s in scores {
        lowest
            .entry(s.total)
            .and_modify(|loc| *loc = (*loc).min(s.location_number))
            .or_insert(s.location_number);
    }
    subset.iter().map(|v| lowest.get(v).copied()).collect()
}
