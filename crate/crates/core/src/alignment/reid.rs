use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AlignmentError;
use crate::model::{BoundingBox, Identity};

pub const DEFAULT_TOP_K: usize = 20;

/// Grid side of the baseline embedding; the vector holds `GRID * GRID` RGB cells.
const GRID: u32 = 8;
pub const EMBEDDING_LEN: usize = (GRID * GRID * 3) as usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryImage {
    pub image_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Identity>,
    pub feature: Vec<f64>,
}

pub fn load_gallery(path: impl AsRef<Path>) -> Result<Vec<GalleryImage>, AlignmentError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| AlignmentError::io(path, e))?;
    let gallery: Vec<GalleryImage> =
        serde_json::from_str(&text).map_err(|e| AlignmentError::Gallery(e.to_string()))?;
    if let Some(first) = gallery.first() {
        let expected = first.feature.len();
        if let Some(bad) = gallery.iter().find(|g| g.feature.len() != expected) {
            return Err(AlignmentError::DimensionMismatch {
                expected,
                found: bad.feature.len(),
            });
        }
    }
    Ok(gallery)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedMatch {
    pub image_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Identity>,
    pub distance: f64,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// The `k` gallery images nearest to `probe` in Euclidean distance,
/// nearest first; equal distances keep gallery order.
pub fn reid_rank(
    gallery: &[GalleryImage],
    probe: &[f64],
    k: usize,
) -> Result<Vec<RankedMatch>, AlignmentError> {
    if gallery.is_empty() {
        return Err(AlignmentError::EmptyGallery);
    }
    for g in gallery {
        if g.feature.len() != probe.len() {
            return Err(AlignmentError::DimensionMismatch {
                expected: g.feature.len(),
                found: probe.len(),
            });
        }
    }
    let mut scored: Vec<(f64, usize)> = gallery
        .iter()
        .enumerate()
        .map(|(i, g)| (euclidean(&g.feature, probe), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(scored
        .into_iter()
        .take(k)
        .map(|(distance, i)| RankedMatch {
            image_id: gallery[i].image_id.clone(),
            label: gallery[i].label,
            distance,
        })
        .collect())
}

/// Area-averages an RGB buffer onto an 8x8 grid and scales to `[0, 1]`.
///
/// Cell `(cx, cy)` averages source pixels with
/// `floor(cx * w / 8) <= x < max(floor((cx + 1) * w / 8), start + 1)`, so
/// images narrower than 8 pixels repeat columns instead of leaving holes.
/// Output order is row-major, RGB interleaved.
pub fn embed_rgb(width: u32, height: u32, rgb: &[u8]) -> Vec<f64> {
    assert_eq!(
        rgb.len(),
        (width * height * 3) as usize,
        "buffer is not width*height RGB"
    );
    assert!(width > 0 && height > 0, "empty image");
    let span = |cell: u32, size: u32| {
        let start = (cell * size / GRID).min(size - 1);
        let end = ((cell + 1) * size / GRID).max(start + 1);
        start..end
    };
    let mut out = Vec::with_capacity(EMBEDDING_LEN);
    for cy in 0..GRID {
        for cx in 0..GRID {
            let mut sum = [0u64; 3];
            let mut count = 0u64;
            for y in span(cy, height) {
                for x in span(cx, width) {
                    let p = ((y * width + x) * 3) as usize;
                    for c in 0..3 {
                        sum[c] += u64::from(rgb[p + c]);
                    }
                    count += 1;
                }
            }
            out.extend(sum.map(|s| s as f64 / (count as f64 * 255.0)));
        }
    }
    out
}

fn decode(bytes: &[u8]) -> Result<image::RgbImage, AlignmentError> {
    image::load_from_memory(bytes)
        .map(|img| img.to_rgb8())
        .map_err(|e| AlignmentError::UndecodableImage(e.to_string()))
}

/// Stand-in appearance feature: the image shrunk to 8x8 RGB, flattened.
pub fn baseline_embed(image_bytes: &[u8]) -> Result<Vec<f64>, AlignmentError> {
    let img = decode(image_bytes)?;
    Ok(embed_rgb(img.width(), img.height(), img.as_raw()))
}

/// Embeds the pixels whose integer coordinates lie inside or on `crop`.
pub fn crop_and_embed(image_bytes: &[u8], crop: &BoundingBox) -> Result<Vec<f64>, AlignmentError> {
    let img = decode(image_bytes)?;
    let (w, h) = img.dimensions();
    let empty = AlignmentError::EmptyCrop {
        width: w,
        height: h,
    };
    let x0 = crop.x_min().ceil() as u32;
    let y0 = crop.y_min().ceil() as u32;
    let x1 = (crop.x_max().floor() as u32).min(w.saturating_sub(1));
    let y1 = (crop.y_max().floor() as u32).min(h.saturating_sub(1));
    if x0 > x1 || y0 > y1 {
        return Err(empty);
    }
    let view = image::imageops::crop_imm(&img, x0, y0, x1 - x0 + 1, y1 - y0 + 1).to_image();
    Ok(embed_rgb(view.width(), view.height(), view.as_raw()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn png(width: u32, height: u32, f: impl Fn(u32, u32) -> [u8; 3]) -> Vec<u8> {
        let img = image::RgbImage::from_fn(width, height, |x, y| image::Rgb(f(x, y)));
        let mut out = std::io::Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png).unwrap();
        out.into_inner()
    }

    fn g(id: &str, feature: Vec<f64>) -> GalleryImage {
        GalleryImage {
            image_id: id.into(),
            label: None,
            feature,
        }
    }

    #[test]
    fn hand_computed_distances() {
        let gallery = [
            g("far", vec![6.0, 8.0]),
            g("origin", vec![0.0, 0.0]),
            g("mid", vec![3.0, 4.0]),
        ];
        let r = reid_rank(&gallery, &[0.0, 0.0], DEFAULT_TOP_K).unwrap();
        let got: Vec<(&str, f64)> = r
            .iter()
            .map(|m| (m.image_id.as_str(), m.distance))
            .collect();
        assert_eq!(got, [("origin", 0.0), ("mid", 5.0), ("far", 10.0)]);
    }

    #[test]
    fn caps_and_errors() {
        let gallery: Vec<GalleryImage> = (0..5)
            .map(|i| g(&i.to_string(), vec![f64::from(i)]))
            .collect();
        assert_eq!(reid_rank(&gallery, &[0.0], 20).unwrap().len(), 5);
        assert_eq!(reid_rank(&gallery, &[0.0], 2).unwrap().len(), 2);
        assert!(matches!(
            reid_rank(&gallery, &[0.0, 1.0], 2),
            Err(AlignmentError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            reid_rank(&[], &[0.0], 2),
            Err(AlignmentError::EmptyGallery)
        ));
    }

    #[test]
    fn ties_keep_gallery_order() {
        let gallery = [g("b", vec![1.0]), g("a", vec![-1.0]), g("c", vec![1.0])];
        let r = reid_rank(&gallery, &[0.0], 3).unwrap();
        let ids: Vec<&str> = r.iter().map(|m| m.image_id.as_str()).collect();
        assert_eq!(ids, ["b", "a", "c"]);
    }

    #[test]
    fn black_and_white_images() {
        let black = baseline_embed(&png(40, 30, |_, _| [0, 0, 0])).unwrap();
        assert_eq!(black, vec![0.0; EMBEDDING_LEN]);
        let white = baseline_embed(&png(5, 3, |_, _| [255, 255, 255])).unwrap();
        assert_eq!(white, vec![1.0; EMBEDDING_LEN]);
    }

    #[test]
    fn embedding_is_deterministic_and_spatial() {
        let bytes = png(16, 16, |x, _| if x < 8 { [255, 0, 0] } else { [0, 0, 255] });
        let a = baseline_embed(&bytes).unwrap();
        assert_eq!(a, baseline_embed(&bytes).unwrap());
        assert_eq!(&a[0..3], &[1.0, 0.0, 0.0]);
        assert_eq!(&a[21..24], &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn garbage_is_undecodable() {
        assert!(matches!(
            baseline_embed(b"not an image"),
            Err(AlignmentError::UndecodableImage(_))
        ));
    }

    #[test]
    fn crop_is_inclusive() {
        let bytes = png(20, 20, |x, y| {
            if (5..=9).contains(&x) && (5..=9).contains(&y) {
                [255, 255, 255]
            } else {
                [0, 0, 0]
            }
        });
        let crop = BoundingBox::new(5.0, 5.0, 9.0, 9.0).unwrap();
        assert_eq!(
            crop_and_embed(&bytes, &crop).unwrap(),
            vec![1.0; EMBEDDING_LEN]
        );
        let outside = BoundingBox::new(25.0, 25.0, 30.0, 30.0).unwrap();
        assert!(matches!(
            crop_and_embed(&bytes, &outside),
            Err(AlignmentError::EmptyCrop { .. })
        ));
    }

    proptest! {
        #[test]
        fn rank_matches_brute_force(
            feats in prop::collection::vec(prop::collection::vec(-5i8..5, 3), 1..40),
            probe in prop::collection::vec(-5i8..5, 3),
            k in 0usize..25,
        ) {
            let gallery: Vec<GalleryImage> = feats.iter().enumerate()
                .map(|(i, f)| g(&i.to_string(), f.iter().map(|&v| f64::from(v)).collect()))
                .collect();
            let probe: Vec<f64> = probe.iter().map(|&v| f64::from(v)).collect();
            let ranked = reid_rank(&gallery, &probe, k).unwrap();
            prop_assert_eq!(ranked.len(), k.min(gallery.len()));
            prop_assert!(ranked.windows(2).all(|w| w[0].distance <= w[1].distance));
            let mut all: Vec<f64> = gallery.iter().map(|x| euclidean(&x.feature, &probe)).collect();
            all.sort_by(f64::total_cmp);
            let got: Vec<f64> = ranked.iter().map(|m| m.distance).collect();
            prop_assert_eq!(got, all[..k.min(all.len())].to_vec());
        }
    }
}
