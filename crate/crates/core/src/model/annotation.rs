use serde::{Deserialize, Serialize};

use super::{BoundingBox, Identity, ModelError};
use crate::SOURCE_FPS;

/// A frame of a specific video.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameRef {
    pub video_id: String,
    pub frame_index: u32,
}

impl FrameRef {
    pub fn new(video_id: impl Into<String>, frame_index: u32) -> Self {
        Self {
            video_id: video_id.into(),
            frame_index,
        }
    }

    pub fn check_in_range(&self, frame_count: u32) -> Result<(), ModelError> {
        if self.frame_index >= frame_count {
            return Err(ModelError::FrameOutOfRange {
                frame_index: self.frame_index,
                frame_count,
            });
        }
        Ok(())
    }
}

/// A box drawn by hand on one frame. The video is implied by the owning
/// [`Track`] or document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyframeAnnotation {
    pub frame_index: u32,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

impl KeyframeAnnotation {
    pub fn new(frame_index: u32, bbox: BoundingBox) -> Self {
        Self { frame_index, bbox }
    }
}

/// Keyframes must be non-empty and strictly increasing in frame index.
pub fn check_keyframes(keyframes: &[KeyframeAnnotation]) -> Result<(), ModelError> {
    if keyframes.is_empty() {
        return Err(ModelError::EmptyTrack);
    }
    for pair in keyframes.windows(2) {
        if pair[1].frame_index <= pair[0].frame_index {
            return Err(ModelError::UnorderedKeyframes {
                previous: pair[0].frame_index,
                next: pair[1].frame_index,
            });
        }
    }
    Ok(())
}

/// One runner's sparse box annotation in one video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrack", into = "RawTrack")]
pub struct Track {
    identity: Identity,
    video_id: String,
    keyframes: Vec<KeyframeAnnotation>,
}

#[derive(Serialize, Deserialize)]
struct RawTrack {
    identity: Identity,
    video_id: String,
    keyframes: Vec<KeyframeAnnotation>,
}

impl TryFrom<RawTrack> for Track {
    type Error = ModelError;

    fn try_from(raw: RawTrack) -> Result<Self, Self::Error> {
        Track::new(raw.identity, raw.video_id, raw.keyframes)
    }
}

impl From<Track> for RawTrack {
    fn from(t: Track) -> Self {
        RawTrack {
            identity: t.identity,
            video_id: t.video_id,
            keyframes: t.keyframes,
        }
    }
}

impl Track {
    /// Keyframes must be non-empty and strictly increasing in frame index.
    pub fn new(
        identity: Identity,
        video_id: impl Into<String>,
        keyframes: Vec<KeyframeAnnotation>,
    ) -> Result<Self, ModelError> {
        check_keyframes(&keyframes)?;
        Ok(Self {
            identity,
            video_id: video_id.into(),
            keyframes,
        })
    }

    pub fn identity(&self) -> Identity {
        self.identity
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn keyframes(&self) -> &[KeyframeAnnotation] {
        &self.keyframes
    }

    pub fn first_frame(&self) -> u32 {
        self.keyframes[0].frame_index
    }

    pub fn last_frame(&self) -> u32 {
        self.keyframes[self.keyframes.len() - 1].frame_index
    }

    /// Adds or replaces the keyframe at `kf.frame_index`, keeping order.
    pub fn with_keyframe(mut self, kf: KeyframeAnnotation) -> Self {
        match self
            .keyframes
            .binary_search_by_key(&kf.frame_index, |k| k.frame_index)
        {
            Ok(i) => self.keyframes[i] = kf,
            Err(i) => self.keyframes.insert(i, kf),
        }
        self
    }
}

/// Frame-level annotation: the first and last frame a runner is visible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRange", into = "RawRange")]
pub struct FrameRangeAnnotation {
    identity: Identity,
    video_id: String,
    start_frame: u32,
    end_frame: u32,
}

#[derive(Serialize, Deserialize)]
struct RawRange {
    identity: Identity,
    video_id: String,
    start_frame: u32,
    end_frame: u32,
}

impl TryFrom<RawRange> for FrameRangeAnnotation {
    type Error = ModelError;

    fn try_from(r: RawRange) -> Result<Self, Self::Error> {
        Self::new(r.identity, r.video_id, r.start_frame, r.end_frame)
    }
}

impl From<FrameRangeAnnotation> for RawRange {
    fn from(r: FrameRangeAnnotation) -> Self {
        RawRange {
            identity: r.identity,
            video_id: r.video_id,
            start_frame: r.start_frame,
            end_frame: r.end_frame,
        }
    }
}

impl FrameRangeAnnotation {
    pub fn new(
        identity: Identity,
        video_id: impl Into<String>,
        start_frame: u32,
        end_frame: u32,
    ) -> Result<Self, ModelError> {
        if start_frame > end_frame {
            return Err(ModelError::InvertedRange {
                start_frame,
                end_frame,
            });
        }
        Ok(Self {
            identity,
            video_id: video_id.into(),
            start_frame,
            end_frame,
        })
    }

    pub fn identity(&self) -> Identity {
        self.identity
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn start_frame(&self) -> u32 {
        self.start_frame
    }

    pub fn end_frame(&self) -> u32 {
        self.end_frame
    }

    /// Frames covered, both ends included.
    pub fn len(&self) -> u32 {
        self.end_frame - self.start_frame + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Detector output (or a linked/labelled box) on one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetection", into = "RawDetection")]
pub struct Detection {
    pub frame_index: u32,
    pub bbox: BoundingBox,
    confidence: f64,
    pub label: Option<Identity>,
}

#[derive(Serialize, Deserialize)]
struct RawDetection {
    frame_index: u32,
    #[serde(rename = "box")]
    bbox: BoundingBox,
    confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<Identity>,
}

impl TryFrom<RawDetection> for Detection {
    type Error = ModelError;

    fn try_from(r: RawDetection) -> Result<Self, Self::Error> {
        let mut d = Detection::new(r.frame_index, r.bbox, r.confidence)?;
        d.label = r.label;
        Ok(d)
    }
}

impl From<Detection> for RawDetection {
    fn from(d: Detection) -> Self {
        RawDetection {
            frame_index: d.frame_index,
            bbox: d.bbox,
            confidence: d.confidence,
            label: d.label,
        }
    }
}

impl Detection {
    pub fn new(frame_index: u32, bbox: BoundingBox, confidence: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(ModelError::ConfidenceOutOfRange(confidence));
        }
        Ok(Self {
            frame_index,
            bbox,
            confidence,
            label: None,
        })
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn labelled(mut self, label: Option<Identity>) -> Self {
        self.label = label;
        self
    }
}

/// All annotations for one video, as stored on disk (one file per video).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDocument", into = "RawDocument")]
pub struct AnnotationDocument {
    video_id: String,
    tracks: Vec<Track>,
    frame_ranges: Vec<FrameRangeAnnotation>,
}

#[derive(Serialize, Deserialize)]
struct RawDocument {
    video_id: String,
    fps_source: u32,
    #[serde(default)]
    tracks: Vec<DocTrack>,
    #[serde(default)]
    frame_ranges: Vec<DocRange>,
}

#[derive(Serialize, Deserialize)]
struct DocTrack {
    identity: Identity,
    keyframes: Vec<KeyframeAnnotation>,
}

#[derive(Serialize, Deserialize)]
struct DocRange {
    identity: Identity,
    start_frame: u32,
    end_frame: u32,
}

impl TryFrom<RawDocument> for AnnotationDocument {
    type Error = ModelError;

    fn try_from(raw: RawDocument) -> Result<Self, Self::Error> {
        if raw.fps_source != SOURCE_FPS {
            return Err(ModelError::UnsupportedFps(raw.fps_source));
        }
        let mut doc = AnnotationDocument::new(raw.video_id);
        for t in raw.tracks {
            let track = Track::new(t.identity, doc.video_id.clone(), t.keyframes)?;
            if doc.track(track.identity).is_some() {
                return Err(ModelError::DuplicateIdentity(track.identity));
            }
            doc.tracks.push(track);
        }
        for r in raw.frame_ranges {
            let range = FrameRangeAnnotation::new(
                r.identity,
                doc.video_id.clone(),
                r.start_frame,
                r.end_frame,
            )?;
            doc.frame_ranges.push(range);
        }
        Ok(doc)
    }
}

impl From<AnnotationDocument> for RawDocument {
    fn from(doc: AnnotationDocument) -> Self {
        RawDocument {
            video_id: doc.video_id,
            fps_source: SOURCE_FPS,
            tracks: doc
                .tracks
                .into_iter()
                .map(|t| DocTrack {
                    identity: t.identity,
                    keyframes: t.keyframes,
                })
                .collect(),
            frame_ranges: doc
                .frame_ranges
                .into_iter()
                .map(|r| DocRange {
                    identity: r.identity,
                    start_frame: r.start_frame,
                    end_frame: r.end_frame,
                })
                .collect(),
        }
    }
}

impl AnnotationDocument {
    pub fn new(video_id: impl Into<String>) -> Self {
        Self {
            video_id: video_id.into(),
            tracks: Vec::new(),
            frame_ranges: Vec::new(),
        }
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn frame_ranges(&self) -> &[FrameRangeAnnotation] {
        &self.frame_ranges
    }

    pub fn track(&self, identity: Identity) -> Option<&Track> {
        self.tracks.iter().find(|t| t.identity == identity)
    }

    /// Inserts or replaces the track for `track.identity()`. Returns the
    /// replaced track, if any.
    pub fn upsert_track(&mut self, track: Track) -> Result<Option<Track>, ModelError> {
        if track.video_id != self.video_id {
            return Err(ModelError::VideoMismatch {
                expected: self.video_id.clone(),
                found: track.video_id,
            });
        }
        match self
            .tracks
            .iter_mut()
            .find(|t| t.identity == track.identity)
        {
            Some(slot) => Ok(Some(std::mem::replace(slot, track))),
            None => {
                self.tracks.push(track);
                Ok(None)
            }
        }
    }

    pub fn remove_track(&mut self, identity: Identity) -> Option<Track> {
        let pos = self.tracks.iter().position(|t| t.identity == identity)?;
        Some(self.tracks.remove(pos))
    }

    pub fn add_frame_range(&mut self, range: FrameRangeAnnotation) -> Result<(), ModelError> {
        if range.video_id != self.video_id {
            return Err(ModelError::VideoMismatch {
                expected: self.video_id.clone(),
                found: range.video_id,
            });
        }
        self.frame_ranges.push(range);
        Ok(())
    }

    /// Same document with every keyframe box rounded to whole pixels.
    pub fn rounded(&self) -> Result<Self, ModelError> {
        let mut out = self.clone();
        for t in &mut out.tracks {
            for kf in &mut t.keyframes {
                kf.bbox = kf.bbox.rounded()?;
            }
        }
        Ok(out)
    }
}
