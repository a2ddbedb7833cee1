use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sample(name: &str) -> String {
    repo().join("data/sample").join(name).display().to_string()
}

fn data(name: &str) -> String {
    repo().join("data").join(name).display().to_string()
}

fn marathon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_marathon"))
        .args(args)
        .env_remove("PORT")
        .env_remove("DATA_ROOT")
        .output()
        .unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = marathon(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    marathon(args).status.code().unwrap()
}

#[test]
fn subsample_matches_enumeration() {
    let v = ok_json(&["subsample", "--frames", "2850", "--fps", "5"]);
    let oracle: Vec<u64> = (0..2850).filter(|i| i % 6 == 0).collect();
    assert_eq!(oracle.len(), 475);
    let got: Vec<u64> = serde_json::from_value(v["indices"].clone()).unwrap();
    assert_eq!(got, oracle);
    assert_eq!(v["count"], 475);

    let all = ok_json(&["subsample", "--frames", "2850", "--fps", "30"]);
    assert_eq!(all["count"], 2850);
    assert_eq!(
        exit_code(&["subsample", "--frames", "2850", "--fps", "7"]),
        1
    );
    assert_eq!(exit_code(&["subsample", "--fps", "5"]), 1);
}

#[test]
fn subsample_reads_frame_dir() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..12 {
        std::fs::write(dir.path().join(format!("img_{i:04}.jpg")), b"").unwrap();
    }
    let v = ok_json(&[
        "subsample",
        "--frame-dir",
        dir.path().to_str().unwrap(),
        "--fps",
        "10",
    ]);
    assert_eq!(v["indices"], serde_json::json!([0, 3, 6, 9]));
    assert_eq!(
        exit_code(&["subsample", "--frame-dir", "/no/such/dir", "--fps", "10"]),
        2
    );
}

#[test]
fn sample_locations_is_deterministic() {
    let args = [
        "sample-locations",
        "--scores",
        &data("location_scores.csv"),
        "--k",
        "6",
        "--c-alpha",
        "1.63",
        "--seed",
        "7",
        "--iterations",
        "10000",
    ];
    let a = marathon(&args);
    let b = marathon(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((v["critical_value"].as_f64().unwrap() - 0.7202).abs() < 1e-4);
    assert!(v["statistic"].as_f64().unwrap() < 0.7202);
    assert_eq!(v["accepted"], true);
    assert_eq!(v["subset"].as_array().unwrap().len(), 6);

    let ex = ok_json(&[
        "sample-locations",
        "--scores",
        &data("location_scores.csv"),
        "--exhaustive",
    ]);
    assert_eq!(ex["evaluated"], 8008);
    assert!(ex["statistic"].as_f64().unwrap() <= v["statistic"].as_f64().unwrap());
    assert_eq!(
        exit_code(&[
            "sample-locations",
            "--scores",
            &data("location_scores.csv"),
            "--exhaustive",
            "--seed",
            "1"
        ]),
        1
    );
    assert_eq!(
        exit_code(&[
            "sample-locations",
            "--scores",
            &data("location_scores.csv"),
            "--k",
            "17"
        ]),
        1
    );
}

#[test]
fn evaluate_identical_inputs_is_perfect() {
    let gt = sample("annotations/cam03.json");
    let v = ok_json(&["evaluate", "--gt", &gt, "--pred", &gt]);
    assert_eq!(v["total"]["f1"], 1.0);
    assert_eq!(v["total"]["fp"], 0);
    assert_eq!(v["total"]["fn"], 0);
}

#[test]
fn evaluate_detections_and_jobs() {
    let gt = sample("annotations/cam03.json");
    let det = sample("detections.json");
    let serial = marathon(&[
        "evaluate", "--gt", &gt, "--pred", &det, "--gt", &gt, "--pred", &gt,
    ]);
    let parallel = marathon(&[
        "evaluate", "--gt", &gt, "--pred", &det, "--gt", &gt, "--pred", &gt, "--jobs", "4",
    ]);
    assert!(serial.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
    let v: Value = serde_json::from_slice(&serial.stdout).unwrap();
    let first = &v["videos"][0]["report"];
    let second = &v["videos"][1]["report"];
    for key in ["tp", "fp", "fn"] {
        assert_eq!(
            v["total"][key].as_u64().unwrap(),
            first[key].as_u64().unwrap() + second[key].as_u64().unwrap()
        );
    }
    let (tp, fp) = (first["tp"].as_f64().unwrap(), first["fp"].as_f64().unwrap());
    let p = first["precision"].as_f64().unwrap();
    assert!((p - tp / (tp + fp)).abs() < 5e-5);

    let costs = ok_json(&[
        "evaluate",
        "--gt",
        &gt,
        "--pred",
        &gt,
        "--costs",
        &sample("unit_costs.json"),
    ]);
    assert_eq!(costs["total"]["workload"]["unit_costs"]["label_s"], 2.0);

    assert_eq!(exit_code(&["evaluate", "--gt", &gt]), 1);
    assert_eq!(
        exit_code(&["evaluate", "--gt", &gt, "--pred", &det, "--pred", &det]),
        1
    );
    assert_eq!(
        exit_code(&["evaluate", "--gt", &gt, "--pred", &det, "--jobs", "0"]),
        1
    );
    assert_eq!(
        exit_code(&["evaluate", "--gt", &gt, "--pred", "/no/such.json"]),
        2
    );
    assert_eq!(
        exit_code(&["evaluate", "--gt", &sample("paths.json"), "--pred", &det]),
        1
    );
}

#[test]
fn interpolate_and_round() {
    let doc = sample("annotations/cam03.json");
    let v = ok_json(&["interpolate", "--annotations", &doc, "--identity", "1001"]);
    let dense = v["tracks"]["1001"].as_object().unwrap();
    assert_eq!(dense.len(), 61);
    assert_eq!(v["tracks"].as_object().unwrap().len(), 1);
    // (100,400,180,620) -> (340,410,420,640) over 30 frames, frame 15 is the midpoint
    assert_eq!(dense["15"], serde_json::json!([220.0, 405.0, 300.0, 630.0]));

    let r = ok_json(&["interpolate", "--annotations", &doc, "--round"]);
    for boxes in r["tracks"].as_object().unwrap().values() {
        for b in boxes.as_object().unwrap().values() {
            for c in b.as_array().unwrap() {
                assert_eq!(c.as_f64().unwrap().fract(), 0.0);
            }
        }
    }
    assert_eq!(
        exit_code(&["interpolate", "--annotations", &doc, "--identity", "999"]),
        1
    );
    assert_eq!(
        exit_code(&["interpolate", "--annotations", &doc, "--identity", "L0R1"]),
        1
    );
}

#[test]
fn link_sample() {
    let v = ok_json(&[
        "link",
        "--paths",
        &sample("paths.json"),
        "--detections",
        &sample("detections.json"),
    ]);
    let dets = v["detections"].as_array().unwrap();
    assert_eq!(dets.len(), 6);
    assert!(dets.iter().all(|d| d["label"].is_string()));
    assert_eq!(v["ambiguous"], serde_json::json!([]));
}

#[test]
fn timeline_and_align_query_agree() {
    let runners = sample("runners/full.csv");
    let out = marathon(&[
        "timeline",
        "--runners",
        &runners,
        "--checkpoints",
        &data("checkpoints.csv"),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("bib,location_number,estimated_passing_s")
    );
    let rows: Vec<(u32, u8, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 6 * 42);

    for (t, dt) in [(3600.0, 60.0), (3000.0, 300.0), (2500.0, 0.0)] {
        let mut expected: Vec<(f64, u32)> = rows
            .iter()
            .filter(|r| r.1 == 17 && (t - dt..=t + dt).contains(&r.2))
            .map(|r| (r.2, r.0))
            .collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0));
        let v = ok_json(&[
            "align-query",
            "--runners",
            &runners,
            "--location",
            "17",
            "--t",
            &t.to_string(),
            "--dt",
            &dt.to_string(),
        ]);
        let got: Vec<u32> = serde_json::from_value(v["bibs"].clone()).unwrap();
        assert_eq!(
            got,
            expected.iter().map(|e| e.1).collect::<Vec<_>>(),
            "t={t} dt={dt}"
        );
    }
    let clock = ok_json(&[
        "align-query",
        "--runners",
        &runners,
        "--location",
        "17",
        "--t",
        "1:00:00",
    ]);
    assert_eq!(clock["t"], 3600.0);
    assert_eq!(clock["dt"], 60.0);
    assert_eq!(
        exit_code(&[
            "align-query",
            "--runners",
            &runners,
            "--location",
            "43",
            "--t",
            "0"
        ]),
        1
    );
    assert_eq!(
        exit_code(&[
            "align-query",
            "--runners",
            &runners,
            "--location",
            "3",
            "--t",
            "soon"
        ]),
        1
    );
}

#[test]
fn reid_rank_feature_and_image() {
    let v = ok_json(&[
        "reid-rank",
        "--gallery",
        &sample("gallery.json"),
        "--probe-feature",
        &sample("probe.json"),
        "--k",
        "2",
    ]);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["image_id"], "cam03_f0012_a");

    let dir = tempfile::tempdir().unwrap();
    let img = image::RgbImage::from_fn(20, 10, |x, _| {
        image::Rgb([if x < 10 { 255 } else { 0 }, 0, 0])
    });
    let png = dir.path().join("probe.png");
    img.save(&png).unwrap();
    let left = image::RgbImage::from_pixel(10, 10, image::Rgb([255, 0, 0]));
    let left_png = dir.path().join("left.png");
    left.save(&left_png).unwrap();
    let all = ok_json(&[
        "reid-rank",
        "--gallery",
        &sample("gallery.json"),
        "--probe-feature",
        &sample("probe.json"),
    ]);
    assert_eq!(all.as_array().unwrap().len(), 4);

    // cropping the probe to its left half must reproduce the left-half embedding
    let feature =
        marathon_core::alignment::baseline_embed(&std::fs::read(&left_png).unwrap()).unwrap();
    let gallery = dir.path().join("gallery.json");
    std::fs::write(
        &gallery,
        serde_json::json!([{"image_id": "left", "feature": feature}, {"image_id": "zeros", "feature": vec![0.0; feature.len()]}]).to_string(),
    )
    .unwrap();
    let v = ok_json(&[
        "reid-rank",
        "--gallery",
        gallery.to_str().unwrap(),
        "--probe-image",
        png.to_str().unwrap(),
        "--box",
        "0,0,9,9",
    ]);
    assert_eq!(v[0]["image_id"], "left");
    assert!(v[0]["distance"].as_f64().unwrap() < 1e-9);
    assert_eq!(
        exit_code(&[
            "reid-rank",
            "--gallery",
            gallery.to_str().unwrap(),
            "--probe-image",
            png.to_str().unwrap(),
            "--box",
            "1,2,3"
        ]),
        1
    );
    assert_eq!(
        exit_code(&[
            "reid-rank",
            "--gallery",
            gallery.to_str().unwrap(),
            "--probe-feature",
            &sample("probe.json")
        ]),
        1
    );
}

#[test]
fn ingest_reports_issues() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("cam30.json");
    std::fs::write(
        &doc,
        r#"{"video_id":"cam30","fps_source":30,"tracks":[{"identity":"7","keyframes":[{"frame_index":9999,"box":[1200,600,1300,800]}]}]}"#,
    )
    .unwrap();
    let v = ok_json(&[
        "ingest",
        "--manifest",
        &sample("videos.json"),
        "--runners",
        &sample("runners/full.csv"),
        "--runners",
        &sample("runners/half.csv"),
        "--annotations",
        &sample("annotations/cam03.json"),
        "--annotations",
        doc.to_str().unwrap(),
    ]);
    assert_eq!(v["runners"], 8);
    assert_eq!(v["stats"]["count"], 3);
    assert_eq!(v["frame_issues"].as_array().unwrap().len(), 2);

    std::fs::write(&doc, r#"{"video_id":"cam99","fps_source":30}"#).unwrap();
    assert_eq!(
        exit_code(&[
            "ingest",
            "--manifest",
            &sample("videos.json"),
            "--annotations",
            doc.to_str().unwrap()
        ]),
        1
    );
    assert_eq!(
        exit_code(&[
            "ingest",
            "--manifest",
            &sample("videos.json"),
            "--runners",
            &sample("runners/full.csv"),
            "--runners",
            &sample("runners/full.csv")
        ]),
        1
    );
    assert_eq!(
        exit_code(&["ingest", "--manifest", "/no/such/videos.json"]),
        2
    );
}

#[test]
fn pretty_and_output_file() {
    let out = marathon(&["--pretty", "subsample", "--frames", "60", "--fps", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("60 frames at 5 fps: 10 indices, stride 6"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = marathon(&[
        "subsample",
        "--frames",
        "60",
        "--fps",
        "5",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["count"], 10);
    assert_eq!(
        exit_code(&[
            "subsample",
            "--frames",
            "60",
            "--fps",
            "5",
            "-o",
            "/no/such/dir/out.json"
        ]),
        2
    );
}

#[test]
fn every_subcommand_documents_its_flags() {
    let expected: [(&str, &[&str]); 10] = [
        ("ingest", &["--manifest", "--runners", "--annotations"]),
        ("subsample", &["--frames", "--frame-dir", "--fps"]),
        (
            "sample-locations",
            &[
                "--scores",
                "--k",
                "--c-alpha",
                "--seed",
                "--iterations",
                "--exhaustive",
            ],
        ),
        ("interpolate", &["--annotations", "--identity", "--round"]),
        ("link", &["--paths", "--detections"]),
        (
            "evaluate",
            &["--gt", "--pred", "--identity", "--costs", "--jobs"],
        ),
        ("timeline", &["--runners", "--checkpoints"]),
        (
            "align-query",
            &["--runners", "--checkpoints", "--location", "--t", "--dt"],
        ),
        (
            "reid-rank",
            &[
                "--gallery",
                "--probe-feature",
                "--probe-image",
                "--box",
                "--k",
            ],
        ),
        (
            "serve",
            &[
                "--host",
                "--port",
                "--data-root",
                "--delta-t",
                "--reid-top-k",
            ],
        ),
    ];
    for (cmd, flags) in expected {
        let out = marathon(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        let help = String::from_utf8(out.stdout).unwrap();
        for flag in flags.iter().chain(&["--pretty", "--output"]) {
            assert!(help.contains(flag), "{cmd} --help lacks {flag}");
        }
    }
    assert_eq!(exit_code(&["--help"]), 0);
    assert_eq!(exit_code(&["frobnicate"]), 1);
    let out = marathon(&["link", "--paths", "x"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("--detections"));
}

#[test]
fn serve_startup_errors() {
    assert_eq!(exit_code(&["serve", "--data-root", "/no/such/root"]), 2);
    assert_eq!(exit_code(&["serve"]), 1);

    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let dir = tempfile::tempdir().unwrap();
    let out = marathon(&[
        "serve",
        "--data-root",
        dir.path().to_str().unwrap(),
        "--port",
        &port,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("already in use"));

    let out = Command::new(env!("CARGO_BIN_EXE_marathon"))
        .args(["serve", "--data-root", dir.path().to_str().unwrap()])
        .env("PORT", &port)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
