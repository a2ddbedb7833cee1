#![allow(dead_code)]

use std::fs;
use std::path::Path;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use marathon_core::alignment::{embed_rgb, GalleryImage};
use marathon_core::model::format_clock_time;
use marathon_service::{router, AppState, ServiceConfig};
use tower::ServiceExt;

pub const FRAME_COUNT: u32 = 60;

/// Seconds per km for each fixture runner, keyed by bib.
pub const PACES: [(u32, u32); 5] = [(101, 200), (102, 210), (103, 212), (104, 220), (105, 180)];

fn runner_csv() -> String {
    let mut out = String::from(
        "bib,name,gender,countryCode,cumulativeTime_5k,cumulativeTime_10k,cumulativeTime_15k,\
         cumulativeTime_20k,cumulativeTime_half,cumulativeTime_25k,cumulativeTime_30k,\
         cumulativeTime_35k,cumulativeTime_40k,cumulativeTime_finish\n",
    );
    let names = [
        "Ana Silva",
        "Ben Okafor",
        "Chen Wei",
        "Dana Silvers",
        "Eli Moreau",
    ];
    for ((bib, pace), name) in PACES.iter().zip(names) {
        let at = |km: f64| format_clock_time((km * f64::from(*pace)).round() as u32);
        let splits: Vec<String> = [5.0, 10.0, 15.0, 20.0, 21.1, 25.0, 30.0, 35.0, 40.0, 42.0]
            .iter()
            .map(|&km| at(km))
            .collect();
        out.push_str(&format!("{bib},{name},F,PT,{}\n", splits.join(",")));
    }
    out
}

pub fn frame_png(shade: u8) -> Vec<u8> {
    let img = image::RgbImage::from_fn(16, 12, |x, y| {
        image::Rgb([shade, (x * 10) as u8, (y * 10) as u8])
    });
    let mut bytes = Vec::new();
    img.write_to(
        &mut std::io::Cursor::new(&mut bytes),
        image::ImageFormat::Png,
    )
    .unwrap();
    bytes
}

pub fn gallery_image(shade: u8) -> Vec<f64> {
    let rgb: Vec<u8> = (0..16 * 12)
        .flat_map(|i| [shade, (i % 16 * 10) as u8, (i / 16 * 10) as u8])
        .collect();
    embed_rgb(16, 12, &rgb)
}

/// A small data root: two videos (one with frames), five runners and a
/// three-image gallery.
pub fn data_root(dir: &Path) {
    fs::write(
        dir.join("videos.json"),
        r#"[
  {"FileName":"cam03.mp4","FileSize":12.5,"FileType":"MP4","Duration":2,"VideoFrameRate":30,
   "ImageSize":"16x12","TrackCreateDate":"2022:03:20 09:40:00","GPSCoordinates":"37.55 127.0",
   "LocationNumber":3},
  {"FileName":"cam17.mp4","FileSize":30,"FileType":"MP4","Duration":95,"VideoFrameRate":30,
   "ImageSize":"1920x1080","TrackCreateDate":"2022:03:20 10:00:00","LocationNumber":17}
]"#,
    )
    .unwrap();
    let frames = dir.join("frames/cam03");
    fs::create_dir_all(&frames).unwrap();
    for i in 0..FRAME_COUNT {
        fs::write(
            frames.join(format!("frame_{i:05}.png")),
            frame_png(i as u8 * 4),
        )
        .unwrap();
    }
    fs::create_dir_all(dir.join("runners")).unwrap();
    fs::write(dir.join("runners/full.csv"), runner_csv()).unwrap();
    let gallery: Vec<GalleryImage> = [10u8, 120, 240]
        .iter()
        .enumerate()
        .map(|(i, &shade)| GalleryImage {
            image_id: format!("g{i}"),
            label: Some(marathon_core::Identity::Bib(101 + i as u32)),
            feature: gallery_image(shade),
        })
        .collect();
    fs::write(
        dir.join("gallery.json"),
        serde_json::to_vec(&gallery).unwrap(),
    )
    .unwrap();
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub app: Router,
}

pub fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    data_root(dir.path());
    let state = AppState::open(&ServiceConfig::new(dir.path())).unwrap();
    Fixture {
        app: router(state),
        dir,
    }
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: axum::http::HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn etag(&self) -> String {
        self.headers[header::ETAG].to_str().unwrap().to_string()
    }
}

pub async fn send(
    app: &Router,
    method: &str,
    uri: &str,
    body: Option<&[u8]>,
    headers: &[(&str, &str)],
) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in headers {
        req = req.header(*k, *v);
    }
    let req = match body {
        Some(b) => req
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(b.to_vec())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    Reply {
        status,
        headers,
        body,
    }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, "GET", uri, None, &[]).await
}

pub async fn post(app: &Router, uri: &str, body: &str) -> Reply {
    send(app, "POST", uri, Some(body.as_bytes()), &[]).await
}
