//! JSON-in, JSON-out bindings used by `www/index.html`.

pub mod preview;

use marathon_core::KeyframeAnnotation;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json(value: &impl Serialize) -> Result<String, JsError> {
    serde_json::to_string(value).map_err(|e| JsError::new(&e.to_string()))
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, JsError> {
    serde_json::from_str(text).map_err(|e| JsError::new(&e.to_string()))
}

/// `[{frame_index, box}]` keyframes to `[{frame_index, box, keyframe}]`.
#[wasm_bindgen]
pub fn interpolate_preview(keyframes_json: &str) -> Result<String, JsError> {
    let kfs: Vec<KeyframeAnnotation> = from_json(keyframes_json)?;
    to_json(&preview::interpolate(&kfs).map_err(|e| JsError::new(&e))?)
}

/// Totals of the bundled 35-location score table.
#[wasm_bindgen]
pub fn bundled_scores() -> Result<String, JsError> {
    to_json(&preview::bundled_scores())
}

#[wasm_bindgen]
pub fn ks_explore(all_json: &str, subset_json: &str, c_alpha: f64) -> Result<String, JsError> {
    let all: Vec<u32> = from_json(all_json)?;
    let subset: Vec<u32> = from_json(subset_json)?;
    to_json(&preview::ks_explore(&all, &subset, c_alpha).map_err(|e| JsError::new(&e))?)
}

#[wasm_bindgen]
pub fn ks_search(
    all_json: &str,
    k: usize,
    c_alpha: f64,
    seed: u32,
    iterations: u32,
    exhaustive: bool,
) -> Result<String, JsError> {
    let all: Vec<u32> = from_json(all_json)?;
    let found = preview::ks_search(&all, k, c_alpha, u64::from(seed), iterations, exhaustive)
        .map_err(|e| JsError::new(&e))?;
    to_json(&found)
}

/// `[{km, seconds}]` splits to passing times at every whole kilometre.
#[wasm_bindgen]
pub fn timeline_preview(splits_json: &str) -> Result<String, JsError> {
    let splits: Vec<preview::SplitInput> = from_json(splits_json)?;
    to_json(&preview::timeline(&splits).map_err(|e| JsError::new(&e))?)
}
