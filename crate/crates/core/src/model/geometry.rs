use serde::{Deserialize, Serialize};

use super::ModelError;

/// Axis-aligned box in pixel coordinates.
///
/// Coordinates are kept as `f64` so interpolated boxes do not lose their
/// fractional part; [`BoundingBox::to_pixels`] rounds for export. Boxes are
/// not clamped to any frame size here, see
/// [`crate::ingest::out_of_frame_boxes`] for that check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, ModelError> {
        let coords = [x_min, y_min, x_max, y_max];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ModelError::NonFiniteCoordinate);
        }
        if coords.iter().any(|&c| c < 0.0) {
            return Err(ModelError::NegativeCoordinate);
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(ModelError::DegenerateBox {
                x_min,
                y_min,
                x_max,
                y_max,
            });
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    /// Builds a box the caller already knows is valid, e.g. a convex
    /// combination of two valid boxes.
    pub(crate) fn from_valid(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        debug_assert!(Self::new(x_min, y_min, x_max, y_max).is_ok());
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Inclusive on all four edges.
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        self.x_min <= x && x <= self.x_max && self.y_min <= y && y <= self.y_max
    }

    /// Overlap rectangle, `None` when the boxes only touch or are disjoint.
    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let x_min = self.x_min.max(other.x_min);
        let y_min = self.y_min.max(other.y_min);
        let x_max = self.x_max.min(other.x_max);
        let y_max = self.y_max.min(other.y_max);
        (x_min < x_max && y_min < y_max).then_some(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }

    /// Integer pixel coordinates, rounding halves up.
    pub fn to_pixels(&self) -> [i64; 4] {
        self.to_array().map(|c| (c + 0.5).floor() as i64)
    }

    /// Copy with coordinates rounded to whole pixels. Rounding can collapse
    /// a sub-pixel box, which is reported as an error.
    pub fn rounded(&self) -> Result<Self, ModelError> {
        let [a, b, c, d] = self.to_pixels().map(|c| c as f64);
        Self::new(a, b, c, d)
    }

    /// Every coordinate within `[0, width] x [0, height]`.
    pub fn fits_in_frame(&self, width: u32, height: u32) -> bool {
        self.x_max <= f64::from(width) && self.y_max <= f64::from(height)
    }
}

impl TryFrom<[f64; 4]> for BoundingBox {
    type Error = ModelError;

    fn try_from([x_min, y_min, x_max, y_max]: [f64; 4]) -> Result<Self, Self::Error> {
        Self::new(x_min, y_min, x_max, y_max)
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        b.to_array()
    }
}

/// One cursor-trace sample: where the annotator pointed at a runner on a frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(u32, f64, f64)", into = "(u32, f64, f64)")]
pub struct PathPoint {
    pub frame_index: u32,
    x: f64,
    y: f64,
}

impl PathPoint {
    pub fn new(frame_index: u32, x: f64, y: f64) -> Result<Self, ModelError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(ModelError::NonFiniteCoordinate);
        }
        if x < 0.0 || y < 0.0 {
            return Err(ModelError::NegativeCoordinate);
        }
        Ok(Self { frame_index, x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

impl TryFrom<(u32, f64, f64)> for PathPoint {
    type Error = ModelError;

    fn try_from((frame_index, x, y): (u32, f64, f64)) -> Result<Self, Self::Error> {
        Self::new(frame_index, x, y)
    }
}

impl From<PathPoint> for (u32, f64, f64) {
    fn from(p: PathPoint) -> Self {
        (p.frame_index, p.x, p.y)
    }
}
