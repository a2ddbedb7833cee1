use std::collections::BTreeMap;

use crate::model::{AnnotationDocument, BoundingBox, Identity, KeyframeAnnotation, Track};

/// Box per frame index, covering every frame between the first and last
/// keyframe.
pub type DenseTrack = BTreeMap<u32, BoundingBox>;

/// Linear interpolation of each corner coordinate between consecutive
/// keyframes. Keyframe frames reproduce their box exactly.
pub fn interpolate_track(track: &Track) -> DenseTrack {
    interpolate_keyframes(track.keyframes())
}

/// Same as [`interpolate_track`] for a bare keyframe list, which must be
/// strictly increasing in frame index. An empty list yields an empty map.
pub fn interpolate_keyframes(keyframes: &[KeyframeAnnotation]) -> DenseTrack {
    let mut dense = DenseTrack::new();
    let Some(last) = keyframes.last() else {
        return dense;
    };
    for pair in keyframes.windows(2) {
        let (k1, k2) = (&pair[0], &pair[1]);
        debug_assert!(k1.frame_index < k2.frame_index);
        let a = k1.bbox.to_array();
        let b = k2.bbox.to_array();
        let span = f64::from(k2.frame_index - k1.frame_index);
        dense.insert(k1.frame_index, k1.bbox);
        for f in k1.frame_index + 1..k2.frame_index {
            let t = f64::from(f - k1.frame_index) / span;
            let c: [f64; 4] = std::array::from_fn(|i| a[i] + (b[i] - a[i]) * t);
            dense.insert(f, BoundingBox::from_valid(c[0], c[1], c[2], c[3]));
        }
    }
    dense.insert(last.frame_index, last.bbox);
    dense
}

/// Dense boxes for every track of a video, keyed by identity.
pub fn densify_document(doc: &AnnotationDocument) -> BTreeMap<Identity, DenseTrack> {
    doc.tracks()
        .iter()
        .map(|t| (t.identity(), interpolate_track(t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kf(f: u32, a: f64, b: f64, c: f64, d: f64) -> KeyframeAnnotation {
        KeyframeAnnotation::new(f, BoundingBox::new(a, b, c, d).unwrap())
    }

    fn track(kfs: Vec<KeyframeAnnotation>) -> Track {
        Track::new(Identity::bib(1).unwrap(), "v", kfs).unwrap()
    }

    #[test]
    fn midpoint() {
        let dense = interpolate_track(&track(vec![
            kf(0, 0.0, 0.0, 10.0, 10.0),
            kf(10, 20.0, 0.0, 30.0, 10.0),
        ]));
        assert_eq!(dense.len(), 11);
        assert_eq!(dense[&5].to_array(), [10.0, 0.0, 20.0, 10.0]);
        assert_eq!(dense[&0].to_array(), [0.0, 0.0, 10.0, 10.0]);
        assert_eq!(dense[&10].to_array(), [20.0, 0.0, 30.0, 10.0]);
    }

    #[test]
    fn per_coordinate_slope() {
        let dense = interpolate_track(&track(vec![
            kf(0, 0.0, 0.0, 10.0, 10.0),
            kf(4, 8.0, 4.0, 18.0, 14.0),
        ]));
        assert_eq!(dense[&1].to_array(), [2.0, 1.0, 12.0, 11.0]);
    }

    #[test]
    fn single_keyframe() {
        let dense = interpolate_track(&track(vec![kf(7, 1.0, 2.0, 3.0, 4.0)]));
        assert_eq!(dense.len(), 1);
        assert_eq!(dense[&7].to_array(), [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn adjacent_keyframes_have_nothing_between() {
        let dense = interpolate_track(&track(vec![
            kf(3, 0.0, 0.0, 1.0, 1.0),
            kf(4, 5.0, 5.0, 6.0, 6.0),
        ]));
        assert_eq!(dense.keys().copied().collect::<Vec<_>>(), [3, 4]);
    }

    fn arb_track() -> impl Strategy<Value = Vec<KeyframeAnnotation>> {
        prop::collection::vec((1u32..20, 0u32..500, 0u32..500, 1u32..200, 1u32..200), 1..8)
            .prop_map(|raw| {
                let mut frame = 0;
                raw.into_iter()
                    .map(|(gap, x, y, w, h)| {
                        frame += gap;
                        let (x, y) = (f64::from(x), f64::from(y));
                        kf(frame, x, y, x + f64::from(w), y + f64::from(h))
                    })
                    .collect()
            })
    }

    proptest! {
        #[test]
        fn keyframes_are_fixpoints(kfs in arb_track()) {
            let dense = interpolate_keyframes(&kfs);
            prop_assert_eq!(dense.len() as u32, kfs.last().unwrap().frame_index - kfs[0].frame_index + 1);
            for k in &kfs {
                prop_assert_eq!(dense[&k.frame_index], k.bbox);
            }
        }

        #[test]
        fn coordinates_move_monotonically(kfs in arb_track()) {
            let dense = interpolate_keyframes(&kfs);
            for pair in kfs.windows(2) {
                let segment: Vec<[f64; 4]> = (pair[0].frame_index..=pair[1].frame_index)
                    .map(|f| dense[&f].to_array())
                    .collect();
                for c in 0..4 {
                    let rising = pair[1].bbox.to_array()[c] >= pair[0].bbox.to_array()[c];
                    let monotone = segment
                        .windows(2)
                        .all(|w| if rising { w[0][c] <= w[1][c] } else { w[0][c] >= w[1][c] });
                    prop_assert!(monotone);
                }
            }
        }

        #[test]
        fn on_path_keyframe_changes_nothing(kfs in arb_track(), pick in any::<prop::sample::Index>()) {
            let dense = interpolate_keyframes(&kfs);
            let first = kfs[0].frame_index;
            let last = kfs.last().unwrap().frame_index;
            let f = first + pick.index((last - first + 1) as usize) as u32;
            let t = track(kfs.clone()).with_keyframe(KeyframeAnnotation::new(f, dense[&f]));
            let again = interpolate_track(&t);
            prop_assert_eq!(again.len(), dense.len());
            for (frame, b) in &dense {
                let a = again[frame].to_array();
                for (x, y) in a.iter().zip(b.to_array()) {
                    prop_assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }
}
