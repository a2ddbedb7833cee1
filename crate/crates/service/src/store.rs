//! On-disk annotation store.
//!
//! Layout under the data root:
//!
//! ```text
//! videos.json                 manifest (optional)
//! frames/<video_id>/          frame images, optionally with frames.txt
//! annotations/<video_id>.json one annotation document per video
//! runners/*.csv               official results
//! checkpoints.csv             location distances (default: one per km)
//! gallery.json                re-id gallery (optional)
//! unique_ids.json             last issued LiRj per location
//! ```

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use marathon_core::alignment::{
    compute_timeline, load_checkpoints_csv, load_gallery, Checkpoint, GalleryImage, Timeline,
    UniqueIdCounter,
};
use marathon_core::ingest::{
    load_manifest, load_runner_csv, FrameSequence, RunnerRecord, VideoMeta,
};
use marathon_core::{AnnotationDocument, Identity, Track};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("data root {0} is not a directory")]
    MissingDataRoot(PathBuf),
    #[error("unknown video {0:?}")]
    UnknownVideo(String),
    #[error("no track for {identity} in video {video_id:?}")]
    UnknownTrack {
        video_id: String,
        identity: Identity,
    },
    #[error("revision conflict: {0}")]
    Conflict(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {reason}")]
    Load { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_err(path: &Path, reason: impl ToString) -> StoreError {
    StoreError::Load {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Opaque revision token of a track: a hash of its canonical JSON.
pub fn revision(track: &Track) -> String {
    let canonical = serde_json::to_vec(track).expect("tracks always serialise");
    Sha256::digest(&canonical)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().expect("store paths have a parent");
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| StoreError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Result of a successful track write.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub track: Track,
    pub revision: String,
    pub created: bool,
}

pub struct Store {
    root: PathBuf,
    videos: Vec<VideoMeta>,
    runners: Vec<RunnerRecord>,
    checkpoints: Vec<Checkpoint>,
    timelines: Vec<Timeline>,
    gallery: Vec<GalleryImage>,
    doc_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    unique_ids: Mutex<UniqueIdCounter>,
}

impl Store {
    /// Loads everything except annotations and frames, which are read per
    /// request. Malformed runner data fails the whole open.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        if !root.is_dir() {
            return Err(StoreError::MissingDataRoot(root));
        }

        let manifest_path = root.join("videos.json");
        let videos = if manifest_path.exists() {
            load_manifest(&manifest_path).map_err(|e| load_err(&manifest_path, e))?
        } else {
            Vec::new()
        };

        let runners = load_runners(&root.join("runners"))?;

        let cp_path = root.join("checkpoints.csv");
        let checkpoints = if cp_path.exists() {
            load_checkpoints_csv(&cp_path).map_err(|e| load_err(&cp_path, e))?
        } else {
            Checkpoint::every_kilometre()
        };
        let timelines = runners
            .iter()
            .map(|r| compute_timeline(r, &checkpoints))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| load_err(&root.join("runners"), e))?;

        let gallery_path = root.join("gallery.json");
        let gallery = if gallery_path.exists() {
            load_gallery(&gallery_path).map_err(|e| load_err(&gallery_path, e))?
        } else {
            Vec::new()
        };

        let ids_path = root.join("unique_ids.json");
        let mut unique_ids: UniqueIdCounter = if ids_path.exists() {
            let text = fs::read_to_string(&ids_path).map_err(io_err(&ids_path))?;
            serde_json::from_str(&text).map_err(|e| load_err(&ids_path, e))?
        } else {
            UniqueIdCounter::new()
        };

        let store = Self {
            root,
            videos,
            runners,
            checkpoints,
            timelines,
            gallery,
            doc_locks: Mutex::default(),
            unique_ids: Mutex::default(),
        };
        for v in &store.videos {
            for t in store.document(v.video_id())?.tracks() {
                unique_ids.observe(t.identity());
            }
        }
        *store.unique_ids.lock().unwrap() = unique_ids;
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn videos(&self) -> &[VideoMeta] {
        &self.videos
    }

    pub fn video(&self, video_id: &str) -> Result<&VideoMeta, StoreError> {
        self.videos
            .iter()
            .find(|v| v.video_id() == video_id)
            .ok_or_else(|| StoreError::UnknownVideo(video_id.to_string()))
    }

    pub fn runners(&self) -> &[RunnerRecord] {
        &self.runners
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn timelines(&self) -> &[Timeline] {
        &self.timelines
    }

    pub fn gallery(&self) -> &[GalleryImage] {
        &self.gallery
    }

    /// Frame images of a known video; `None` when no frame directory exists.
    pub fn frames(&self, video_id: &str) -> Result<Option<FrameSequence>, StoreError> {
        self.video(video_id)?;
        let dir = self.root.join("frames").join(video_id);
        if !dir.is_dir() {
            return Ok(None);
        }
        FrameSequence::load(video_id, &dir)
            .map(Some)
            .map_err(|e| load_err(&dir, e))
    }

    fn document_path(&self, video_id: &str) -> PathBuf {
        self.root
            .join("annotations")
            .join(format!("{video_id}.json"))
    }

    /// The stored document, or an empty one if the video has none yet.
    pub fn document(&self, video_id: &str) -> Result<AnnotationDocument, StoreError> {
        self.video(video_id)?;
        let path = self.document_path(video_id);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Ok(AnnotationDocument::new(video_id))
            }
            Err(e) => return Err(io_err(&path)(e)),
        };
        let doc: AnnotationDocument =
            serde_json::from_str(&text).map_err(|e| load_err(&path, e))?;
        if doc.video_id() != video_id {
            return Err(load_err(
                &path,
                format!("document is for video {:?}", doc.video_id()),
            ));
        }
        Ok(doc)
    }

    pub fn track(&self, video_id: &str, identity: Identity) -> Result<Track, StoreError> {
        self.document(video_id)?
            .track(identity)
            .cloned()
            .ok_or_else(|| StoreError::UnknownTrack {
                video_id: video_id.to_string(),
                identity,
            })
    }

    fn doc_lock(&self, video_id: &str) -> Arc<Mutex<()>> {
        self.doc_locks
            .lock()
            .unwrap()
            .entry(video_id.to_string())
            .or_default()
            .clone()
    }

    fn save(&self, doc: &AnnotationDocument) -> Result<(), StoreError> {
        let bytes = serde_json::to_vec_pretty(doc).expect("documents always serialise");
        write_atomic(&self.document_path(doc.video_id()), &bytes)
    }

    /// Creates or replaces a track.
    ///
    /// Without `if_match` only creation is allowed. With it, the stored
    /// track's revision must equal the token. Writing content identical to
    /// what is stored always succeeds, so a replayed request is a no-op.
    pub fn put_track(&self, track: Track, if_match: Option<&str>) -> Result<Written, StoreError> {
        let video_id = track.video_id().to_string();
        let lock = self.doc_lock(&video_id);
        let _guard = lock.lock().unwrap();

        let mut doc = self.document(&video_id)?;
        let revision_new = revision(&track);
        let current = doc.track(track.identity()).map(revision);
        if current.as_deref() == Some(revision_new.as_str()) {
            return Ok(Written {
                track,
                revision: revision_new,
                created: false,
            });
        }
        match (current.as_deref(), if_match) {
            (None, None) => {}
            (Some(_), None) => {
                return Err(StoreError::Conflict(format!(
                    "track {} exists; send its revision in If-Match",
                    track.identity()
                )))
            }
            (None, Some(_)) => {
                return Err(StoreError::Conflict(format!(
                    "track {} no longer exists",
                    track.identity()
                )))
            }
            (Some(cur), Some(token)) if cur != token => {
                return Err(StoreError::Conflict(format!(
                    "track {} is at revision {cur}, not {token}",
                    track.identity()
                )))
            }
            (Some(_), Some(_)) => {}
        }
        let created = doc
            .upsert_track(track.clone())
            .map_err(|e| StoreError::Invalid(e.to_string()))?
            .is_none();
        self.save(&doc)?;
        self.unique_ids.lock().unwrap().observe(track.identity());
        Ok(Written {
            track,
            revision: revision_new,
            created,
        })
    }

    /// Removes a track. A given `if_match` must equal its current revision.
    pub fn delete_track(
        &self,
        video_id: &str,
        identity: Identity,
        if_match: Option<&str>,
    ) -> Result<Track, StoreError> {
        let lock = self.doc_lock(video_id);
        let _guard = lock.lock().unwrap();

        let mut doc = self.document(video_id)?;
        let current = doc
            .track(identity)
            .ok_or_else(|| StoreError::UnknownTrack {
                video_id: video_id.to_string(),
                identity,
            })?;
        if let Some(token) = if_match {
            let cur = revision(current);
            if cur != token {
                return Err(StoreError::Conflict(format!(
                    "track {identity} is at revision {cur}, not {token}"
                )));
            }
        }
        let removed = doc.remove_track(identity).expect("track was just found");
        self.save(&doc)?;
        Ok(removed)
    }

    /// Issues the next `LiRj` for a location and persists the counter before
    /// returning it.
    pub fn assign_unique_id(&self, location_number: u8) -> Result<Identity, StoreError> {
        let mut counter = self.unique_ids.lock().unwrap();
        let mut next = counter.clone();
        let id = next
            .assign(location_number)
            .map_err(|e| StoreError::Invalid(e.to_string()))?;
        let bytes = serde_json::to_vec_pretty(&next).expect("counter always serialises");
        write_atomic(&self.root.join("unique_ids.json"), &bytes)?;
        *counter = next;
        Ok(id)
    }
}

fn load_runners(dir: &Path) -> Result<Vec<RunnerRecord>, StoreError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .map(|e| e.map(|e| e.path()).map_err(io_err(dir)))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")));
    files.sort();

    let mut all: Vec<RunnerRecord> = Vec::new();
    for f in files {
        let records = load_runner_csv(&f).map_err(|e| load_err(&f, e))?;
        for r in records {
            if all.iter().any(|o| o.bib == r.bib) {
                return Err(load_err(
                    &f,
                    format!("bib {} appears more than once", r.bib),
                ));
            }
            all.push(r);
        }
    }
    all.sort_by_key(|r| r.bib);
    Ok(all)
}
