use std::fs;
use std::path::{Path, PathBuf};

use super::IngestError;
use crate::SOURCE_FPS;

/// Name of the optional per-directory frame list, one file name per line.
pub const FRAME_LIST_FILE: &str = "frames.txt";

const IMAGE_EXTENSIONS: [&str; 4] = ["png", "jpg", "jpeg", "bmp"];

/// Extracted frames of one video, in frame-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    video_id: String,
    directory: PathBuf,
    frames: Vec<String>,
}

fn frame_number(name: &str) -> Option<u64> {
    let stem = Path::new(name).file_stem()?.to_str()?;
    let digits = stem.trim_start_matches(|c: char| !c.is_ascii_digit());
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()))
        .then(|| digits.parse().ok())
        .flatten()
}

impl FrameSequence {
    /// Names must carry a numeric suffix (`frame_000123.png`, `000123.jpg`)
    /// and be listed in strictly increasing numeric order.
    pub fn new(
        video_id: impl Into<String>,
        directory: impl Into<PathBuf>,
        frames: Vec<String>,
    ) -> Result<Self, IngestError> {
        let mut previous: Option<u64> = None;
        for name in &frames {
            let n = frame_number(name)
                .ok_or_else(|| IngestError::FrameList(format!("{name:?} has no frame number")))?;
            if previous.is_some_and(|p| n <= p) {
                return Err(IngestError::FrameList(format!("{name:?} is out of order")));
            }
            previous = Some(n);
        }
        Ok(Self {
            video_id: video_id.into(),
            directory: directory.into(),
            frames,
        })
    }

    pub fn from_list(
        video_id: impl Into<String>,
        directory: impl Into<PathBuf>,
        list: &str,
    ) -> Result<Self, IngestError> {
        let frames = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        Self::new(video_id, directory, frames)
    }

    /// Reads `frames.txt` from `directory`, or lists the image files in it
    /// when there is no frame list.
    pub fn load(
        video_id: impl Into<String>,
        directory: impl AsRef<Path>,
    ) -> Result<Self, IngestError> {
        let directory = directory.as_ref();
        let list_path = directory.join(FRAME_LIST_FILE);
        if list_path.is_file() {
            let text =
                fs::read_to_string(&list_path).map_err(|e| IngestError::io(&list_path, e))?;
            return Self::from_list(video_id, directory, &text);
        }
        let mut frames = Vec::new();
        for entry in fs::read_dir(directory).map_err(|e| IngestError::io(directory, e))? {
            let entry = entry.map_err(|e| IngestError::io(directory, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            let is_image = Path::new(&name)
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
            if is_image {
                frames.push(name);
            }
        }
        frames.sort_by_key(|n| (frame_number(n), n.clone()));
        Self::new(video_id, directory, frames)
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn directory(&self) -> &Path {
        &self.directory
    }

    pub fn frames(&self) -> &[String] {
        &self.frames
    }

    pub fn frame_count(&self) -> u32 {
        self.frames.len() as u32
    }

    pub fn frame_path(&self, index: u32) -> Option<PathBuf> {
        self.frames
            .get(index as usize)
            .map(|name| self.directory.join(name))
    }

    pub fn subsample(&self, target_fps: u32) -> Result<Vec<u32>, IngestError> {
        subsample_indices(self.frame_count(), target_fps)
    }
}

/// Frame indices kept when sampling a 30 fps sequence down to `target_fps`:
/// every `30 / target_fps`-th frame starting at 0.
pub fn subsample_indices(frame_count: u32, target_fps: u32) -> Result<Vec<u32>, IngestError> {
    if target_fps == 0 || !SOURCE_FPS.is_multiple_of(target_fps) {
        return Err(IngestError::NonDivisorFps(target_fps));
    }
    let stride = (SOURCE_FPS / target_fps) as usize;
    Ok((0..frame_count).step_by(stride).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn five_fps_from_95_seconds() {
        // enumerate 0, 6, 12, ... < 2850 by hand
        let mut expected = Vec::new();
        let mut i = 0;
        while i < 2850 {
            expected.push(i);
            i += 6;
        }
        let got = subsample_indices(2850, 5).unwrap();
        assert_eq!(got.len(), 475);
        assert_eq!(got, expected);
        assert_eq!(*got.last().unwrap(), 2844);
    }

    #[test]
    fn thirty_fps_is_identity() {
        assert_eq!(
            subsample_indices(2850, 30).unwrap(),
            (0..2850).collect::<Vec<_>>()
        );
    }

    #[test]
    fn non_divisors_rejected() {
        for fps in [0, 4, 7, 8, 20, 31, 60] {
            assert!(matches!(
                subsample_indices(100, fps),
                Err(IngestError::NonDivisorFps(f)) if f == fps
            ));
        }
    }

    #[test]
    fn frame_list_must_be_ordered() {
        assert!(FrameSequence::from_list("v", "/tmp", "frame_0001.png\nframe_0002.png\n").is_ok());
        assert!(FrameSequence::from_list("v", "/tmp", "frame_0002.png\nframe_0001.png\n").is_err());
        assert!(FrameSequence::from_list("v", "/tmp", "cover.png\n").is_err());
    }

    #[test]
    fn load_lists_directory_without_frame_list() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["000010.png", "000002.png", "notes.txt", "000001.png"] {
            fs::write(dir.path().join(name), b"x").unwrap();
        }
        let seq = FrameSequence::load("v", dir.path()).unwrap();
        assert_eq!(seq.frames(), ["000001.png", "000002.png", "000010.png"]);
        assert_eq!(seq.frame_path(2).unwrap(), dir.path().join("000010.png"));
        assert!(seq.frame_path(3).is_none());
    }

    proptest! {
        #[test]
        fn subsample_shape(count in 0u32..5000, fps in prop::sample::select(vec![1u32, 2, 3, 5, 6, 10, 15, 30])) {
            let idx = subsample_indices(count, fps).unwrap();
            let stride = 30 / fps;
            prop_assert_eq!(idx.len() as u32, count.div_ceil(stride));
            if count > 0 {
                prop_assert_eq!(idx[0], 0);
            }
            prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(idx.iter().all(|&i| i < count));
        }

        #[test]
        fn coarser_rate_is_subset(count in 0u32..3000) {
            let divisors = [1u32, 2, 3, 5, 6, 10, 15, 30];
            for &a in &divisors {
                for &b in &divisors {
                    if b % a == 0 {
                        let fine = subsample_indices(count, b).unwrap();
                        let coarse = subsample_indices(count, a).unwrap();
                        prop_assert!(coarse.iter().all(|i| fine.binary_search(i).is_ok()));
                    }
                }
            }
        }
    }
}
