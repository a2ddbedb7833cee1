use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AlignmentError;
use crate::ingest::{RunnerRecord, SplitDistance};
use crate::LOCATION_COUNT;

/// A camera location and its distance along the course.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub location_number: u8,
    pub distance_km: f64,
}

impl Checkpoint {
    /// Location `n` at `n` km, for `n` in `1..=42`.
    pub fn every_kilometre() -> Vec<Checkpoint> {
        (1..=LOCATION_COUNT)
            .map(|n| Checkpoint {
                location_number: n,
                distance_km: f64::from(n),
            })
            .collect()
    }
}

pub fn load_checkpoints_csv(path: impl AsRef<Path>) -> Result<Vec<Checkpoint>, AlignmentError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AlignmentError::io(path, e))?;
    read_checkpoints_csv(file)
}

/// Reads `location_number,distance_km` rows.
pub fn read_checkpoints_csv(input: impl Read) -> Result<Vec<Checkpoint>, AlignmentError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in reader.deserialize::<Checkpoint>() {
        let cp = row?;
        if !(1..=LOCATION_COUNT).contains(&cp.location_number) {
            return Err(AlignmentError::UnknownLocation(cp.location_number));
        }
        if !cp.distance_km.is_finite() || cp.distance_km < 0.0 {
            return Err(AlignmentError::InvalidCheckpoint(format!(
                "location {} has distance {}",
                cp.location_number, cp.distance_km
            )));
        }
        if !seen.insert(cp.location_number) {
            return Err(AlignmentError::InvalidCheckpoint(format!(
                "location {} listed twice",
                cp.location_number
            )));
        }
        out.push(cp);
    }
    Ok(out)
}

/// Average speed over one segment, in km/s.
pub fn segment_speed(
    d_i_km: f64,
    t_i_s: f64,
    d_j_km: f64,
    t_j_s: f64,
) -> Result<f64, AlignmentError> {
    let ordered = d_i_km >= 0.0 && t_i_s >= 0.0 && d_j_km > d_i_km && t_j_s > t_i_s;
    if !ordered {
        return Err(AlignmentError::NonMonotoneSplit {
            d_i: d_i_km,
            t_i: t_i_s,
            d_j: d_j_km,
            t_j: t_j_s,
        });
    }
    Ok((d_j_km - d_i_km) / (t_j_s - t_i_s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub location_number: u8,
    pub distance_km: f64,
    /// Seconds since the start gun.
    pub estimated_passing_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub bib: u32,
    /// Ordered by distance.
    pub entries: Vec<TimelineEntry>,
}

impl Timeline {
    pub fn passing_time(&self, location_number: u8) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.location_number == location_number)
            .map(|e| e.estimated_passing_s)
    }
}

/// Estimated passing time of a runner at every checkpoint on their course.
///
/// Each checkpoint falls in the segment between the two nearest distances
/// with a recorded time (the start counts as 0 km at 0 s); missing
/// intermediate splits just widen the segment. Within a segment the runner
/// moves at that segment's average speed, so the estimate is
/// `t_i + (d_x - d_i) / v_ij`. Checkpoints on a recorded split return it
/// exactly; checkpoints past the runner's finish, or past their last
/// recorded split, are left out.
pub fn compute_timeline(
    record: &RunnerRecord,
    checkpoints: &[Checkpoint],
) -> Result<Timeline, AlignmentError> {
    if record.splits.len() < 2 {
        return Err(AlignmentError::InsufficientSplits { bib: record.bib });
    }
    let mut known: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    known.extend(record.splits.iter().map(|(d, t)| (d.km(), f64::from(*t))));
    for pair in known.windows(2) {
        segment_speed(pair[0].0, pair[0].1, pair[1].0, pair[1].1)?;
    }
    let last_km = record.finish_distance().km().min(known[known.len() - 1].0);

    let mut ordered: Vec<&Checkpoint> = checkpoints.iter().collect();
    ordered.sort_by(|a, b| {
        a.distance_km
            .total_cmp(&b.distance_km)
            .then(a.location_number.cmp(&b.location_number))
    });

    let mut entries = Vec::with_capacity(ordered.len());
    for cp in ordered {
        let d = cp.distance_km;
        if d > last_km {
            continue;
        }
        let exact = SplitDistance::from_km(d).and_then(|sd| record.splits.get(&sd));
        let passing = match exact {
            Some(&t) => f64::from(t),
            None if d == 0.0 => 0.0,
            None => {
                let j = known.partition_point(|&(kd, _)| kd < d);
                let (d_i, t_i) = known[j - 1];
                let (d_j, t_j) = known[j];
                let speed = segment_speed(d_i, t_i, d_j, t_j)?;
                t_i + (d - d_i) / speed
            }
        };
        entries.push(TimelineEntry {
            location_number: cp.location_number,
            distance_km: d,
            estimated_passing_s: passing,
        });
    }
    Ok(Timeline {
        bib: record.bib,
        entries,
    })
}

/// `bib,location_number,estimated_passing_s` rows.
pub fn write_timelines_csv(timelines: &[Timeline], out: impl Write) -> Result<(), AlignmentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bib", "location_number", "estimated_passing_s"])?;
    for t in timelines {
        for e in &t.entries {
            w.write_record([
                t.bib.to_string(),
                e.location_number.to_string(),
                format!("{:.3}", e.estimated_passing_s),
            ])?;
        }
    }
    w.flush()
        .map_err(|e| AlignmentError::io(Path::new("<csv output>"), e))?;
    Ok(())
}
