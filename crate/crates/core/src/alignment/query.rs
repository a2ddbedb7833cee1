use super::{AlignmentError, Timeline};
use crate::ingest::RunnerRecord;
use crate::LOCATION_COUNT;

/// Default half-width of the passing-time window, in seconds.
pub const DEFAULT_WINDOW_S: f64 = 60.0;

/// Bibs whose estimated passing time at `location_number` lies in
/// `[t - delta, t + delta]`, earliest first (ties by bib).
pub fn time_window_query(
    timelines: &[Timeline],
    location_number: u8,
    t_s: f64,
    delta_s: f64,
) -> Result<Vec<u32>, AlignmentError> {
    if !(1..=LOCATION_COUNT).contains(&location_number) {
        return Err(AlignmentError::UnknownLocation(location_number));
    }
    if !t_s.is_finite() || !delta_s.is_finite() || delta_s < 0.0 {
        return Err(AlignmentError::InvalidWindow);
    }
    let (lo, hi) = (t_s - delta_s, t_s + delta_s);
    let mut hits: Vec<(f64, u32)> = timelines
        .iter()
        .filter_map(|tl| {
            tl.passing_time(location_number)
                .filter(|p| (lo..=hi).contains(p))
                .map(|p| (p, tl.bib))
        })
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(hits.into_iter().map(|(_, bib)| bib).collect())
}

/// Runners whose name contains `fragment` (case-insensitive) or whose bib,
/// written in decimal, contains it. Sorted by bib.
pub fn partial_search<'a>(
    records: &'a [RunnerRecord],
    fragment: &str,
) -> Result<Vec<&'a RunnerRecord>, AlignmentError> {
    let fragment = fragment.trim();
    if fragment.is_empty() {
        return Err(AlignmentError::EmptyFragment);
    }
    let needle = fragment.to_lowercase();
    let mut hits: Vec<&RunnerRecord> = records
        .iter()
        .filter(|r| r.name.to_lowercase().contains(&needle) || r.bib.to_string().contains(fragment))
        .collect();
    hits.sort_by_key(|r| r.bib);
    Ok(hits)
}

/// Dashboard search with separate name and bib fragments; both must match
/// when both are given. Blank fragments are ignored.
pub fn search_runners<'a>(
    records: &'a [RunnerRecord],
    name: Option<&str>,
    bib: Option<&str>,
) -> Vec<&'a RunnerRecord> {
    let name = name
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_lowercase);
    let bib = bib.map(str::trim).filter(|s| !s.is_empty());
    let mut hits: Vec<&RunnerRecord> = records
        .iter()
        .filter(|r| {
            name.as_ref()
                .is_none_or(|n| r.name.to_lowercase().contains(n.as_str()))
        })
        .filter(|r| bib.is_none_or(|b| r.bib.to_string().contains(b)))
        .collect();
    hits.sort_by_key(|r| r.bib);
    hits
}
