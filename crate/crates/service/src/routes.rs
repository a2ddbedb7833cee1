use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use marathon_core::alignment::{
    baseline_embed, crop_and_embed, reid_rank, search_runners, time_window_query,
};
use marathon_core::bbox::{
    evaluate as evaluate_predictions, interpolate_keyframes, link_paths_to_detections, GroundTruth,
    Paths, UnitCosts,
};
use marathon_core::ingest::subsample_indices;
use marathon_core::model::check_keyframes;
use marathon_core::{BoundingBox, Detection, Identity, KeyframeAnnotation, Track, SOURCE_FPS};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::store::{revision, StoreError, Written};
use crate::AppState;

const BODY_LIMIT: usize = 32 * 1024 * 1024;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/videos", get(list_videos))
        .route("/videos/{id}/frames", get(frame_indices))
        .route("/videos/{id}/frames/{index}", get(frame_image))
        .route(
            "/videos/{id}/tracks/{identity}",
            get(get_track).put(put_track).delete(delete_track),
        )
        .route("/videos/{id}/ranges", get(ranges))
        .route("/interpolate", post(interpolate))
        .route("/link", post(link))
        .route("/evaluate", post(evaluate))
        .route("/runners", get(runners))
        .route("/runners/{bib}/timeline", get(timeline))
        .route("/alignment", get(alignment))
        .route("/unique-id", post(unique_id))
        .route("/reid/query", post(reid_query))
        .route("/rules", get(rules))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such route") })
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl ToString) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message.to_string())
    }

    fn not_found(message: impl ToString) -> Self {
        Self::new(StatusCode::NOT_FOUND, message.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match e {
            StoreError::UnknownVideo(_) | StoreError::UnknownTrack { .. } => StatusCode::NOT_FOUND,
            StoreError::Conflict(_) => StatusCode::CONFLICT,
            StoreError::Invalid(_) => StatusCode::BAD_REQUEST,
            StoreError::MissingDataRoot(_) | StoreError::Load { .. } | StoreError::Io { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        Self::new(status, e.to_string())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs file-system work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce() -> ApiResult<T> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

fn parse_identity(text: &str) -> ApiResult<Identity> {
    text.parse().map_err(ApiError::bad_request)
}

fn if_match(headers: &HeaderMap) -> ApiResult<Option<String>> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    let text = value
        .to_str()
        .map_err(|_| ApiError::bad_request("If-Match is not ASCII"))?
        .trim();
    let text = text.strip_prefix("W/").unwrap_or(text);
    Ok(Some(text.trim_matches('"').to_string()))
}

fn track_response(status: StatusCode, track: &Track, revision: &str) -> Response {
    let body = serde_json::to_vec(track).expect("tracks always serialise");
    let etag = HeaderValue::from_str(&format!("\"{revision}\"")).expect("hex is a valid header");
    (
        status,
        [
            (
                header::CONTENT_TYPE,
                HeaderValue::from_static("application/json"),
            ),
            (header::ETAG, etag),
        ],
        body,
    )
        .into_response()
}

async fn list_videos(State(s): State<AppState>) -> Response {
    Json(s.store.videos()).into_response()
}

#[derive(Deserialize)]
struct FpsQuery {
    fps: Option<u32>,
}

#[derive(Serialize)]
struct FrameIndices {
    video_id: String,
    fps: u32,
    frame_count: u32,
    indices: Vec<u32>,
}

async fn frame_indices(
    State(s): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<FpsQuery>, QueryRejection>,
) -> ApiResult<Json<FrameIndices>> {
    let fps = query?.0.fps.unwrap_or(SOURCE_FPS);
    blocking(move || {
        let frame_count = match s.store.frames(&id)? {
            Some(seq) => seq.frame_count(),
            None => u32::try_from(s.store.video(&id)?.frame_count())
                .map_err(|_| ApiError::bad_request("frame count exceeds u32"))?,
        };
        let indices = subsample_indices(frame_count, fps).map_err(ApiError::bad_request)?;
        Ok(Json(FrameIndices {
            video_id: id,
            fps,
            frame_count,
            indices,
        }))
    })
    .await
}

async fn frame_image(
    State(s): State<AppState>,
    Path((id, index)): Path<(String, String)>,
) -> ApiResult<Response> {
    let index: u32 = index
        .parse()
        .map_err(|_| ApiError::bad_request(format!("frame index {index:?} is not a number")))?;
    blocking(move || {
        let seq = s
            .store
            .frames(&id)?
            .ok_or_else(|| ApiError::not_found(format!("video {id:?} has no frames")))?;
        let path = seq.frame_path(index).ok_or_else(|| {
            ApiError::not_found(format!(
                "frame {index} out of range for {} frames",
                seq.frame_count()
            ))
        })?;
        let bytes = std::fs::read(&path)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        let mime = match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
        {
            Some(e) if e == "png" => "image/png",
            Some(e) if e == "jpg" || e == "jpeg" => "image/jpeg",
            _ => "application/octet-stream",
        };
        Ok(([(header::CONTENT_TYPE, mime)], bytes).into_response())
    })
    .await
}

async fn get_track(
    State(s): State<AppState>,
    Path((id, identity)): Path<(String, String)>,
) -> ApiResult<Response> {
    let identity = parse_identity(&identity)?;
    blocking(move || {
        let track = s.store.track(&id, identity)?;
        Ok(track_response(StatusCode::OK, &track, &revision(&track)))
    })
    .await
}

/// Body of a track PUT. `identity` and `video_id` may be omitted; when
/// present they must agree with the path.
#[derive(Deserialize)]
struct TrackBody {
    identity: Option<Identity>,
    video_id: Option<String>,
    keyframes: Vec<KeyframeAnnotation>,
}

async fn put_track(
    State(s): State<AppState>,
    Path((id, identity)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let identity = parse_identity(&identity)?;
    let token = if_match(&headers)?;
    let body: TrackBody = parse_body(&body)?;
    if body.identity.is_some_and(|i| i != identity) {
        return Err(ApiError::bad_request("body identity differs from the path"));
    }
    if body.video_id.as_ref().is_some_and(|v| *v != id) {
        return Err(ApiError::bad_request("body video_id differs from the path"));
    }
    let track = Track::new(identity, id, body.keyframes).map_err(ApiError::bad_request)?;
    blocking(move || {
        let Written {
            track, revision, ..
        } = s.store.put_track(track, token.as_deref())?;
        Ok(track_response(StatusCode::OK, &track, &revision))
    })
    .await
}

async fn delete_track(
    State(s): State<AppState>,
    Path((id, identity)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult<Json<serde_json::Value>> {
    let identity = parse_identity(&identity)?;
    let token = if_match(&headers)?;
    blocking(move || {
        s.store.delete_track(&id, identity, token.as_deref())?;
        Ok(Json(json!({ "deleted": identity, "video_id": id })))
    })
    .await
}

async fn ranges(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    blocking(move || {
        let doc = s.store.document(&id)?;
        Ok(Json(doc.frame_ranges()).into_response())
    })
    .await
}

#[derive(Deserialize)]
struct InterpolateBody {
    keyframes: Vec<KeyframeAnnotation>,
}

async fn interpolate(body: Bytes) -> ApiResult<Response> {
    let body: InterpolateBody = parse_body(&body)?;
    check_keyframes(&body.keyframes).map_err(ApiError::bad_request)?;
    Ok(Json(interpolate_keyframes(&body.keyframes)).into_response())
}

#[derive(Deserialize)]
struct LinkBody {
    paths: Paths,
    detections: Vec<Detection>,
}

async fn link(body: Bytes) -> ApiResult<Response> {
    let body: LinkBody = parse_body(&body)?;
    Ok(Json(link_paths_to_detections(&body.paths, &body.detections)).into_response())
}

#[derive(Deserialize)]
struct EvaluateBody {
    video_id: String,
    identity: Option<Identity>,
    predictions: Vec<Detection>,
    unit_costs: Option<UnitCosts>,
}

async fn evaluate(State(s): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let body: EvaluateBody = parse_body(&body)?;
    blocking(move || {
        let doc = s.store.document(&body.video_id)?;
        let mut gt = GroundTruth::from_document(&doc);
        if let Some(identity) = body.identity {
            if doc.track(identity).is_none() {
                return Err(StoreError::UnknownTrack {
                    video_id: body.video_id,
                    identity,
                }
                .into());
            }
            gt = gt.restrict_to(identity);
        }
        let costs = body.unit_costs.unwrap_or_default();
        let (matches, report) = evaluate_predictions(&gt, &body.predictions, costs);
        Ok(Json(json!({ "report": report, "assignments": matches.assignments })).into_response())
    })
    .await
}

#[derive(Deserialize)]
struct RunnerQuery {
    name: Option<String>,
    bib: Option<String>,
}

async fn runners(
    State(s): State<AppState>,
    query: Result<Query<RunnerQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let q = query?.0;
    let hits = search_runners(s.store.runners(), q.name.as_deref(), q.bib.as_deref());
    Ok(Json(hits).into_response())
}

async fn timeline(State(s): State<AppState>, Path(bib): Path<String>) -> ApiResult<Response> {
    let bib: u32 = bib
        .parse()
        .map_err(|_| ApiError::bad_request(format!("bib {bib:?} is not a number")))?;
    let tl = s
        .store
        .timelines()
        .iter()
        .find(|t| t.bib == bib)
        .ok_or_else(|| ApiError::not_found(format!("no runner with bib {bib}")))?;
    Ok(Json(tl).into_response())
}

#[derive(Deserialize)]
struct AlignmentQuery {
    location: u8,
    t: f64,
    dt: Option<f64>,
}

async fn alignment(
    State(s): State<AppState>,
    query: Result<Query<AlignmentQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let q = query?.0;
    let dt = q.dt.unwrap_or(s.delta_t_default);
    let bibs = time_window_query(s.store.timelines(), q.location, q.t, dt)
        .map_err(ApiError::bad_request)?;
    Ok(Json(json!({ "location": q.location, "t": q.t, "dt": dt, "bibs": bibs })).into_response())
}

#[derive(Deserialize)]
struct UniqueIdBody {
    location: u8,
}

async fn unique_id(State(s): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let body: UniqueIdBody = parse_body(&body)?;
    blocking(move || {
        let id = s.store.assign_unique_id(body.location)?;
        Ok(Json(json!({ "identity": id })).into_response())
    })
    .await
}

/// Either a ready feature vector or an encoded image, optionally cropped.
#[derive(Deserialize)]
struct ReidBody {
    feature: Option<Vec<f64>>,
    image_base64: Option<String>,
    #[serde(rename = "box")]
    bbox: Option<BoundingBox>,
    k: Option<usize>,
}

async fn reid_query(State(s): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let body: ReidBody = parse_body(&body)?;
    let k = body.k.unwrap_or(s.reid_top_k).min(s.reid_top_k);
    if k == 0 {
        return Err(ApiError::bad_request("k must be at least 1"));
    }
    if s.store.gallery().is_empty() {
        return Err(ApiError::not_found("no re-id gallery loaded"));
    }
    blocking(move || {
        let probe = match (body.feature, body.image_base64) {
            (Some(f), None) => {
                if body.bbox.is_some() {
                    return Err(ApiError::bad_request("box applies only to image probes"));
                }
                f
            }
            (None, Some(b64)) => {
                let bytes = base64::engine::general_purpose::STANDARD
                    .decode(b64.trim())
                    .map_err(|e| ApiError::bad_request(format!("image_base64: {e}")))?;
                match body.bbox {
                    Some(b) => crop_and_embed(&bytes, &b),
                    None => baseline_embed(&bytes),
                }
                .map_err(ApiError::bad_request)?
            }
            _ => {
                return Err(ApiError::bad_request(
                    "send exactly one of feature or image_base64",
                ))
            }
        };
        let matches = reid_rank(s.store.gallery(), &probe, k).map_err(ApiError::bad_request)?;
        Ok(Json(json!({ "k": k, "matches": matches })).into_response())
    })
    .await
}

const RULES_PAGE: &str = include_str!("rules.html");

async fn rules() -> Html<&'static str> {
    Html(RULES_PAGE)
}
