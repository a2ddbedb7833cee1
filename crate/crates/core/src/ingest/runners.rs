use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{format_clock_time, parse_clock_time};

/// Course distance in tenths of a kilometre, so 21.1 km compares exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitDistance(u16);

impl SplitDistance {
    pub const HALF: SplitDistance = SplitDistance(211);
    /// Full-marathon finish, taken as 42.0 km.
    pub const FULL: SplitDistance = SplitDistance(420);

    pub const fn from_tenths(tenths: u16) -> Self {
        Self(tenths)
    }

    pub fn tenths(self) -> u16 {
        self.0
    }

    pub fn km(self) -> f64 {
        f64::from(self.0) / 10.0
    }

    /// `None` unless `km` sits on a 0.1 km grid point.
    pub fn from_km(km: f64) -> Option<Self> {
        let tenths = km * 10.0;
        let rounded = tenths.round();
        ((tenths - rounded).abs() < 1e-9 && (0.0..=f64::from(u16::MAX)).contains(&rounded))
            .then_some(Self(rounded as u16))
    }
}

impl fmt::Display for SplitDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(10) {
            write!(f, "{}", self.0 / 10)
        } else {
            write!(f, "{}.{}", self.0 / 10, self.0 % 10)
        }
    }
}

impl Serialize for SplitDistance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SplitDistance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<f64>()
            .ok()
            .and_then(SplitDistance::from_km)
            .ok_or_else(|| serde::de::Error::custom(format!("bad split distance {text:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Race {
    FullMarathon,
    HalfMarathon,
}

impl Race {
    pub fn finish_distance(self) -> SplitDistance {
        match self {
            Race::FullMarathon => SplitDistance::FULL,
            Race::HalfMarathon => SplitDistance::HALF,
        }
    }

    fn parse(text: &str) -> Option<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "full" | "fullmarathon" | "full marathon" => Some(Race::FullMarathon),
            "half" | "halfmarathon" | "half marathon" => Some(Race::HalfMarathon),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Race::FullMarathon => "full",
            Race::HalfMarathon => "half",
        }
    }
}

/// Registration data and official split times of one finisher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunnerRecord {
    pub bib: u32,
    pub name: String,
    pub gender: String,
    pub country_code: String,
    pub race: Race,
    /// Cumulative seconds at each recorded distance, finish included.
    /// Missing splits are simply absent.
    pub splits: BTreeMap<SplitDistance, u32>,
    pub finish_time_s: u32,
}

impl RunnerRecord {
    pub fn finish_distance(&self) -> SplitDistance {
        self.race.finish_distance()
    }

    fn check(&self) -> Result<(), String> {
        if self.splits.get(&self.finish_distance()) != Some(&self.finish_time_s) {
            return Err("finish time missing from splits".into());
        }
        let mut prev: Option<(SplitDistance, u32)> = None;
        for (&d, &t) in &self.splits {
            if d > self.finish_distance() {
                return Err(format!("split at {d} km lies beyond the finish"));
            }
            if let Some((pd, pt)) = prev {
                if t <= pt {
                    return Err(format!(
                        "split at {d} km ({}) is not after the split at {pd} km ({})",
                        format_clock_time(t),
                        format_clock_time(pt)
                    ));
                }
            }
            prev = Some((d, t));
        }
        Ok(())
    }
}

/// Split columns in course order, paired with their distance.
const SPLIT_COLUMNS: [(&str, u16); 8] = [
    ("cumulativeTime_5k", 50),
    ("cumulativeTime_10k", 100),
    ("cumulativeTime_15k", 150),
    ("cumulativeTime_20k", 200),
    ("cumulativeTime_half", 211),
    ("cumulativeTime_25k", 250),
    ("cumulativeTime_30k", 300),
    ("cumulativeTime_35k", 350),
];
const SPLIT_40K: (&str, u16) = ("cumulativeTime_40k", 400);
const FINISH_COLUMN: &str = "cumulativeTime_finish";
const REQUIRED: [&str; 5] = ["bib", "name", "gender", "countryCode", FINISH_COLUMN];
/// Columns only a full-marathon export has.
const FULL_ONLY: [&str; 6] = [
    "cumulativeTime_20k",
    "cumulativeTime_half",
    "cumulativeTime_25k",
    "cumulativeTime_30k",
    "cumulativeTime_35k",
    "cumulativeTime_40k",
];

fn split_columns() -> impl Iterator<Item = (&'static str, u16)> {
    SPLIT_COLUMNS.into_iter().chain(std::iter::once(SPLIT_40K))
}

pub fn load_runner_csv(path: impl AsRef<Path>) -> Result<Vec<RunnerRecord>, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_runner_csv(file)
}

/// Parses a results export.
///
/// The race comes from an optional `race` column (`full`/`half`); without
/// one, a header containing any split past 15 km marks the whole file as
/// full-marathon results. Empty split cells are missing splits.
pub fn read_runner_csv(input: impl Read) -> Result<Vec<RunnerRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    for name in REQUIRED {
        column(name).ok_or_else(|| IngestError::MissingColumn(name.to_string()))?;
    }
    let col = |name: &str| column(name).expect("checked above");
    let race_col = column("race");
    let header_race = if FULL_ONLY.iter().any(|c| column(c).is_some()) {
        Race::FullMarathon
    } else {
        Race::HalfMarathon
    };
    let splits: Vec<(usize, SplitDistance)> = split_columns()
        .filter_map(|(name, d)| column(name).map(|i| (i, SplitDistance(d))))
        .collect();

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let malformed = |reason: String| IngestError::MalformedRow { line, reason };
        let field = |i: usize| row.get(i).unwrap_or("");

        let bib_text = field(col("bib"));
        let bib: u32 = bib_text
            .parse()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| malformed(format!("unparseable bib {bib_text:?}")))?;
        let race = match race_col.map(field) {
            Some(text) if !text.is_empty() => {
                Race::parse(text).ok_or_else(|| malformed(format!("unknown race {text:?}")))?
            }
            _ => header_race,
        };
        let time = |text: &str| parse_clock_time(text).map_err(|e| malformed(e.to_string()));
        let finish_text = field(col(FINISH_COLUMN));
        if finish_text.is_empty() {
            return Err(malformed("missing finish time".into()));
        }
        let finish_time_s = time(finish_text)?;

        let mut split_map = BTreeMap::new();
        for &(i, d) in &splits {
            let text = field(i);
            if text.is_empty() {
                continue;
            }
            let t = time(text)?;
            if d == race.finish_distance() && t != finish_time_s {
                return Err(malformed(format!(
                    "split at {d} km disagrees with the finish time"
                )));
            }
            split_map.insert(d, t);
        }
        split_map.insert(race.finish_distance(), finish_time_s);

        let record = RunnerRecord {
            bib,
            name: field(col("name")).to_string(),
            gender: field(col("gender")).to_string(),
            country_code: field(col("countryCode")).to_string(),
            race,
            splits: split_map,
            finish_time_s,
        };
        record.check().map_err(malformed)?;
        if !seen.insert(bib) {
            return Err(IngestError::DuplicateBib(bib));
        }
        records.push(record);
    }
    Ok(records)
}

/// Writes records back in the export layout.
///
/// All-full or all-half inputs get the layout of their race without a
/// `race` column; a mixed list gets the full layout plus `race`.
pub fn write_runner_csv(records: &[RunnerRecord], out: impl Write) -> Result<(), IngestError> {
    let all_half = records.iter().all(|r| r.race == Race::HalfMarathon) && !records.is_empty();
    let mixed = !all_half && records.iter().any(|r| r.race == Race::HalfMarathon);
    let split_cols: Vec<(&str, u16)> = if all_half {
        split_columns()
            .filter(|(name, _)| !FULL_ONLY.contains(name))
            .collect()
    } else {
        split_columns().collect()
    };

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["bib", "name", "gender", "countryCode"];
    if mixed {
        header.push("race");
    }
    header.extend(split_cols.iter().map(|(name, _)| *name));
    header.push(FINISH_COLUMN);
    w.write_record(&header)?;

    for r in records {
        let mut row = vec![
            r.bib.to_string(),
            r.name.clone(),
            r.gender.clone(),
            r.country_code.clone(),
        ];
        if mixed {
            row.push(r.race.label().to_string());
        }
        for &(_, d) in &split_cols {
            let d = SplitDistance(d);
            let cell = if d == r.finish_distance() {
                // the half split of a half-marathon is its finish column
                String::new()
            } else {
                r.splits
                    .get(&d)
                    .map(|&t| format_clock_time(t))
                    .unwrap_or_default()
            };
            row.push(cell);
        }
        row.push(format_clock_time(r.finish_time_s));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| IngestError::io("<csv output>", e))?;
    Ok(())
}
