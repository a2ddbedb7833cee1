use std::fs;
use std::path::Path;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{AnnotationDocument, Identity};
use crate::LOCATION_COUNT;

const CREATE_DATE_FORMAT: &str = "%Y:%m:%d %H:%M:%S";

/// Metadata of one recorded video, read from the camera's container tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVideoMeta", into = "RawVideoMeta")]
pub struct VideoMeta {
    pub file_name: String,
    pub file_size_mb: f64,
    pub file_type: String,
    pub duration_s: f64,
    pub frame_rate: f64,
    pub width: u32,
    pub height: u32,
    pub track_create_date: NaiveDateTime,
    pub gps: Option<(f64, f64)>,
    pub location_number: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "PascalCase")]
struct RawVideoMeta {
    file_name: String,
    file_size: f64,
    file_type: String,
    duration: f64,
    video_frame_rate: f64,
    image_size: String,
    track_create_date: String,
    #[serde(
        rename = "GPSCoordinates",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    gps_coordinates: Option<String>,
    location_number: u8,
}

impl TryFrom<RawVideoMeta> for VideoMeta {
    type Error = String;

    fn try_from(raw: RawVideoMeta) -> Result<Self, Self::Error> {
        let name = &raw.file_name;
        let (w, h) = raw
            .image_size
            .split_once('x')
            .ok_or_else(|| format!("{name}: ImageSize {:?} is not WxH", raw.image_size))?;
        let width: u32 = w
            .trim()
            .parse()
            .map_err(|_| format!("{name}: bad width {w:?}"))?;
        let height: u32 = h
            .trim()
            .parse()
            .map_err(|_| format!("{name}: bad height {h:?}"))?;
        let track_create_date =
            NaiveDateTime::parse_from_str(&raw.track_create_date, CREATE_DATE_FORMAT)
                .map_err(|e| format!("{name}: TrackCreateDate {:?}: {e}", raw.track_create_date))?;
        let gps = match raw.gps_coordinates.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(text) => {
                let mut parts = text.split_whitespace().map(str::parse::<f64>);
                match (parts.next(), parts.next(), parts.next()) {
                    (Some(Ok(lat)), Some(Ok(lon)), None) => Some((lat, lon)),
                    _ => {
                        return Err(format!(
                            "{name}: GPSCoordinates {text:?} is not \"lat lon\""
                        ))
                    }
                }
            }
        };
        if raw.duration.is_nan() || raw.duration <= 0.0 {
            return Err(format!("{name}: Duration must be positive"));
        }
        if raw.video_frame_rate.is_nan() || raw.video_frame_rate <= 0.0 {
            return Err(format!("{name}: VideoFrameRate must be positive"));
        }
        if width == 0 || height == 0 {
            return Err(format!("{name}: ImageSize must be non-zero"));
        }
        if !(1..=LOCATION_COUNT).contains(&raw.location_number) {
            return Err(format!(
                "{name}: LocationNumber {} outside 1..={LOCATION_COUNT}",
                raw.location_number
            ));
        }
        Ok(VideoMeta {
            file_name: raw.file_name,
            file_size_mb: raw.file_size,
            file_type: raw.file_type,
            duration_s: raw.duration,
            frame_rate: raw.video_frame_rate,
            width,
            height,
            track_create_date,
            gps,
            location_number: raw.location_number,
        })
    }
}

impl From<VideoMeta> for RawVideoMeta {
    fn from(m: VideoMeta) -> Self {
        RawVideoMeta {
            file_name: m.file_name,
            file_size: m.file_size_mb,
            file_type: m.file_type,
            duration: m.duration_s,
            video_frame_rate: m.frame_rate,
            image_size: format!("{}x{}", m.width, m.height),
            track_create_date: m.track_create_date.format(CREATE_DATE_FORMAT).to_string(),
            gps_coordinates: m.gps.map(|(lat, lon)| format!("{lat} {lon}")),
            location_number: m.location_number,
        }
    }
}

impl VideoMeta {
    /// File name without its extension; used as the video id everywhere else.
    pub fn video_id(&self) -> &str {
        Path::new(&self.file_name)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(&self.file_name)
    }

    pub fn frame_count(&self) -> u64 {
        (self.duration_s * self.frame_rate).round() as u64
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<VideoMeta>, IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| IngestError::Manifest(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub count: usize,
    pub total_duration_h: f64,
    pub mean_duration_s: f64,
    /// Population standard deviation.
    pub std_duration_s: f64,
    pub total_frames: u64,
}

pub fn dataset_stats(manifest: &[VideoMeta]) -> Result<DatasetStats, IngestError> {
    if manifest.is_empty() {
        return Err(IngestError::EmptyManifest);
    }
    let n = manifest.len() as f64;
    let total: f64 = manifest.iter().map(|m| m.duration_s).sum();
    let mean = total / n;
    let var = manifest
        .iter()
        .map(|m| (m.duration_s - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(DatasetStats {
        count: manifest.len(),
        total_duration_h: total / 3600.0,
        mean_duration_s: mean,
        std_duration_s: var.sqrt(),
        total_frames: manifest.iter().map(VideoMeta::frame_count).sum(),
    })
}

/// A keyframe that does not fit its video.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameIssue {
    pub identity: Identity,
    pub frame_index: u32,
    pub reason: String,
}

/// Flags keyframes past the end of the video or boxes extending outside the
/// image.
pub fn out_of_frame_boxes(doc: &AnnotationDocument, meta: &VideoMeta) -> Vec<FrameIssue> {
    let frame_count = meta.frame_count();
    let mut issues = Vec::new();
    for track in doc.tracks() {
        for kf in track.keyframes() {
            if u64::from(kf.frame_index) >= frame_count {
                issues.push(FrameIssue {
                    identity: track.identity(),
                    frame_index: kf.frame_index,
                    reason: format!(
                        "frame past the last frame ({})",
                        frame_count.saturating_sub(1)
                    ),
                });
            }
            if !kf.bbox.fits_in_frame(meta.width, meta.height) {
                issues.push(FrameIssue {
                    identity: track.identity(),
                    frame_index: kf.frame_index,
                    reason: format!(
                        "box {:?} exceeds {}x{}",
                        kf.bbox.to_array(),
                        meta.width,
                        meta.height
                    ),
                });
            }
        }
    }
    issues
}
