//! Slow, obvious reference implementations the acceptance suite checks the
//! engine against. Nothing here depends on the engine itself.

/// Two-sample KS distance as an exact fraction `(numerator, denominator)`,
/// found by evaluating both step CDFs at every sample value.
pub fn ks_fraction(a: &[u32], b: &[u32]) -> (u64, u64) {
    let (na, nb) = (a.len() as u64, b.len() as u64);
    let le = |s: &[u32], x: u32| s.iter().filter(|&&v| v <= x).count() as u64;
    let best = a
        .iter()
        .chain(b)
        .map(|&x| (le(a, x) * nb).abs_diff(le(b, x) * na))
        .max()
        .unwrap_or(0);
    (best, na * nb)
}

/// IoU of two integer boxes `[x0, y0, x1, y1]` by counting unit cells.
pub fn cell_iou(a: [u32; 4], b: [u32; 4]) -> f64 {
    let inside = |r: [u32; 4], x: u32, y: u32| x >= r[0] && x < r[2] && y >= r[1] && y < r[3];
    let (mut both, mut either) = (0u32, 0u32);
    let hi_x = a[2].max(b[2]);
    let hi_y = a[3].max(b[3]);
    for x in 0..hi_x {
        for y in 0..hi_y {
            let (ia, ib) = (inside(a, x, y), inside(b, x, y));
            both += u32::from(ia && ib);
            either += u32::from(ia || ib);
        }
    }
    f64::from(both) / f64::from(either)
}

/// Box at `frame` on the polyline through `keyframes` (sorted by frame).
pub fn lerp_box(keyframes: &[(u32, [f64; 4])], frame: u32) -> Option<[f64; 4]> {
    if let Some((_, b)) = keyframes.iter().find(|(f, _)| *f == frame) {
        return Some(*b);
    }
    let i = keyframes.iter().position(|(f, _)| *f > frame)?;
    if i == 0 {
        return None;
    }
    let (f0, b0) = keyframes[i - 1];
    let (f1, b1) = keyframes[i];
    let t = f64::from(frame - f0) / f64::from(f1 - f0);
    Some(std::array::from_fn(|k| b0[k] * (1.0 - t) + b1[k] * t))
}

/// One detection of a linking scene.
#[derive(Debug, Clone, Copy)]
pub struct SceneBox {
    pub frame: u32,
    pub bbox: [f64; 4],
}

/// One cursor sample of a linking scene.
#[derive(Debug, Clone, Copy)]
pub struct ScenePoint {
    pub runner: u32,
    pub frame: u32,
    pub x: f64,
    pub y: f64,
}

/// For every detection, the sorted runners whose trace touches it on its
/// frame. An empty list means the detection is dropped.
pub fn containment(detections: &[SceneBox], points: &[ScenePoint]) -> Vec<Vec<u32>> {
    detections
        .iter()
        .map(|d| {
            let mut hits: Vec<u32> = points
                .iter()
                .filter(|p| {
                    p.frame == d.frame
                        && d.bbox[0] <= p.x
                        && p.x <= d.bbox[2]
                        && d.bbox[1] <= p.y
                        && p.y <= d.bbox[3]
                })
                .map(|p| p.runner)
                .collect();
            hits.sort_unstable();
            hits.dedup();
            hits
        })
        .collect()
}

/// Passing time at `km` from `(km, seconds)` splits sorted by distance,
/// assuming constant speed between neighbouring splits and a start at 0/0.
pub fn passing_time(splits: &[(f64, f64)], km: f64) -> Option<f64> {
    let mut prev = (0.0, 0.0);
    for &(d, t) in splits {
        if km == d {
            return Some(t);
        }
        if km < d {
            return Some(prev.1 + (km - prev.0) * (t - prev.1) / (d - prev.0));
        }
        prev = (d, t);
    }
    None
}

/// Bibs with a passing time within `delta` of `t`, earliest first then by bib.
pub fn window(passings: &[(u32, f64)], t: f64, delta: f64) -> Vec<u32> {
    let mut hits: Vec<(u32, f64)> = passings
        .iter()
        .copied()
        .filter(|&(_, p)| (p - t).abs() <= delta)
        .collect();
    hits.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    hits.into_iter().map(|(bib, _)| bib).collect()
}

/// Indices of the `k` rows nearest to `probe`, nearest first, ties by index.
pub fn nearest(rows: &[Vec<f64>], probe: &[f64], k: usize) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let sq: f64 = r.iter().zip(probe).map(|(a, b)| (a - b) * (a - b)).sum();
            (i, sq.sqrt())
        })
        .collect();
    all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}
