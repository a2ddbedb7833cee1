use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use marathon_core::alignment::{
    baseline_embed, compute_timeline, crop_and_embed, load_checkpoints_csv, load_gallery,
    reid_rank, time_window_query, write_timelines_csv, Checkpoint, Timeline,
};
use marathon_core::bbox::{
    evaluate, interpolate_track, link_paths_to_detections, merge_reports, EvaluationReport,
    GroundTruth, MatchReport, Paths, UnitCosts,
};
use marathon_core::ingest::{
    dataset_stats, load_manifest, load_runner_csv, out_of_frame_boxes, subsample_indices,
    FrameSequence, RunnerRecord,
};
use marathon_core::model::{format_clock_time, parse_clock_time};
use marathon_core::sampling::{
    load_scores_csv, locations_for_scores, select_sample_scores, SearchMode,
};
use marathon_core::{AnnotationDocument, BoundingBox, Detection, Identity};
use marathon_service::ServiceConfig;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::error::CliError;
use crate::table;

/// What a subcommand prints: the machine form and the `--pretty` form.
pub struct Rendered {
    pub machine: String,
    pub human: String,
}

impl Rendered {
    fn json(value: &impl Serialize, human: String) -> Self {
        Self {
            machine: serde_json::to_string(value).expect("outputs always serialise") + "\n",
            human,
        }
    }
}

type CmdResult = Result<Rendered, CliError>;

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn parse_identity(text: &str) -> Result<Identity, CliError> {
    text.parse().map_err(CliError::from)
}

fn secs(t: f64) -> String {
    if t.fract() == 0.0 && t >= 0.0 && t < f64::from(u32::MAX) {
        format_clock_time(t as u32)
    } else {
        format!("{t:.1} s")
    }
}

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Subsample(a) => subsample(a),
        Command::SampleLocations(a) => sample_locations(a),
        Command::Interpolate(a) => interpolate(a),
        Command::Link(a) => link(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Timeline(a) => timeline(a),
        Command::AlignQuery(a) => align_query(a),
        Command::ReidRank(a) => reid(a),
        Command::Serve(a) => serve(a),
    }
}

fn ingest(a: IngestArgs) -> CmdResult {
    let manifest = load_manifest(&a.manifest)?;
    let stats = dataset_stats(&manifest)?;

    let mut runners: Vec<RunnerRecord> = Vec::new();
    for path in &a.runners {
        for r in load_runner_csv(path)? {
            if runners.iter().any(|o| o.bib == r.bib) {
                return Err(CliError::Validation(format!(
                    "{}: bib {} already listed",
                    path.display(),
                    r.bib
                )));
            }
            runners.push(r);
        }
    }

    let mut issues = Vec::new();
    for path in &a.annotations {
        let doc: AnnotationDocument = read_json(path)?;
        let meta = manifest
            .iter()
            .find(|m| m.video_id() == doc.video_id())
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "{}: video {:?} is not in the manifest",
                    path.display(),
                    doc.video_id()
                ))
            })?;
        for issue in out_of_frame_boxes(&doc, meta) {
            issues.push(json!({
                "video_id": doc.video_id(),
                "identity": issue.identity,
                "frame_index": issue.frame_index,
                "reason": issue.reason,
            }));
        }
    }

    let videos: Vec<_> = manifest
        .iter()
        .map(|m| {
            json!({
                "video_id": m.video_id(),
                "location_number": m.location_number,
                "duration_s": m.duration_s,
                "frame_count": m.frame_count(),
            })
        })
        .collect();
    let out = json!({
        "stats": stats,
        "videos": videos,
        "runners": runners.len(),
        "frame_issues": issues,
    });

    let mut human = table::render(
        &["video", "location", "duration", "frames"],
        &manifest
            .iter()
            .map(|m| {
                vec![
                    m.video_id().to_string(),
                    m.location_number.to_string(),
                    format!("{:.1} s", m.duration_s),
                    m.frame_count().to_string(),
                ]
            })
            .collect::<Vec<_>>(),
    );
    human.push_str(&format!(
        "\n{} videos, {:.2} h, mean {:.1} s (sd {:.1} s), {} frames\n{} runners\n",
        stats.count,
        stats.total_duration_h,
        stats.mean_duration_s,
        stats.std_duration_s,
        stats.total_frames,
        runners.len()
    ));
    for i in &issues {
        human.push_str(&format!(
            "issue: {} {} frame {}: {}\n",
            i["video_id"].as_str().unwrap_or_default(),
            i["identity"].as_str().unwrap_or_default(),
            i["frame_index"],
            i["reason"].as_str().unwrap_or_default()
        ));
    }
    Ok(Rendered::json(&out, human))
}

fn subsample(a: SubsampleArgs) -> CmdResult {
    let frame_count = match (a.frames, &a.frame_dir) {
        (Some(n), _) => n,
        (None, Some(dir)) => {
            let id = dir
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            FrameSequence::load(id, dir)?.frame_count()
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let indices = subsample_indices(frame_count, a.fps)?;
    let stride = marathon_core::SOURCE_FPS / a.fps;
    let out = json!({
        "frame_count": frame_count,
        "fps": a.fps,
        "stride": stride,
        "count": indices.len(),
        "indices": indices,
    });
    let mut human = format!(
        "{frame_count} frames at {} fps: {} indices, stride {stride}\n",
        a.fps,
        indices.len()
    );
    for chunk in indices.chunks(10) {
        let line: Vec<String> = chunk.iter().map(u32::to_string).collect();
        human.push_str(&line.join(" "));
        human.push('\n');
    }
    Ok(Rendered::json(&out, human))
}

fn sample_locations(a: SampleArgs) -> CmdResult {
    let scores = load_scores_csv(&a.scores)?;
    let totals: Vec<u32> = scores.iter().map(|s| s.total).collect();
    let mode = if a.exhaustive {
        SearchMode::Exhaustive
    } else {
        SearchMode::Random {
            iterations: a.iterations,
            seed: a.seed,
        }
    };
    let sel = select_sample_scores(&totals, a.k, a.c_alpha, mode)?;
    let locations = locations_for_scores(&scores, &sel.subset);
    let out = json!({
        "subset": sel.subset,
        "locations": locations,
        "statistic": sel.ks.statistic,
        "critical_value": sel.ks.critical_value,
        "accepted": sel.ks.accepted,
        "evaluated": sel.evaluated,
        "mode": if a.exhaustive { "exhaustive" } else { "random" },
    });
    let rows: Vec<Vec<String>> = sel
        .subset
        .iter()
        .zip(&locations)
        .map(|(s, l)| vec![s.to_string(), l.map_or("-".into(), |l| l.to_string())])
        .collect();
    let mut human = table::render(&["score", "location"], &rows);
    human.push_str(&format!(
        "\nD = {:.4}, D_alpha = {:.4}: {} ({} subsets evaluated)\n",
        sel.ks.statistic,
        sel.ks.critical_value,
        if sel.ks.accepted {
            "accepted"
        } else {
            "rejected"
        },
        sel.evaluated
    ));
    Ok(Rendered::json(&out, human))
}

fn interpolate(a: InterpolateArgs) -> CmdResult {
    let doc: AnnotationDocument = read_json(&a.annotations)?;
    let only = a.identity.as_deref().map(parse_identity).transpose()?;
    if let Some(id) = only {
        if doc.track(id).is_none() {
            return Err(CliError::Validation(format!(
                "no track for {id} in video {:?}",
                doc.video_id()
            )));
        }
    }
    let mut tracks: BTreeMap<Identity, BTreeMap<u32, BoundingBox>> = BTreeMap::new();
    for t in doc.tracks() {
        if only.is_some_and(|id| id != t.identity()) {
            continue;
        }
        let mut dense = interpolate_track(t);
        if a.round {
            for b in dense.values_mut() {
                *b = b.rounded()?;
            }
        }
        tracks.insert(t.identity(), dense);
    }
    let out = json!({ "video_id": doc.video_id(), "tracks": tracks });
    let rows: Vec<Vec<String>> = tracks
        .iter()
        .flat_map(|(id, dense)| {
            dense.iter().map(move |(f, b)| {
                let c = b.to_array();
                vec![
                    id.to_string(),
                    f.to_string(),
                    format!("{:.2}", c[0]),
                    format!("{:.2}", c[1]),
                    format!("{:.2}", c[2]),
                    format!("{:.2}", c[3]),
                ]
            })
        })
        .collect();
    let human = table::render(
        &["identity", "frame", "x_min", "y_min", "x_max", "y_max"],
        &rows,
    );
    Ok(Rendered::json(&out, human))
}

fn link(a: LinkArgs) -> CmdResult {
    let paths: Paths = read_json(&a.paths)?;
    let detections: Vec<Detection> = read_json(&a.detections)?;
    let result = link_paths_to_detections(&paths, &detections);
    let rows: Vec<Vec<String>> = result
        .detections
        .iter()
        .map(|d| {
            vec![
                d.frame_index.to_string(),
                format!("{:?}", d.bbox.to_array()),
                d.label.map_or("(ambiguous)".into(), |l| l.to_string()),
            ]
        })
        .collect();
    let mut human = table::render(&["frame", "box", "label"], &rows);
    human.push_str(&format!(
        "\nkept {} of {} detections, {} ambiguous\n",
        result.detections.len(),
        detections.len(),
        result.ambiguous.len()
    ));
    Ok(Rendered::json(&result, human))
}

/// Predictions are either a detection list or an annotation document whose
/// dense boxes become detections with confidence 1.
fn load_predictions(path: &Path) -> Result<Vec<Detection>, CliError> {
    let value: serde_json::Value = read_json(path)?;
    if value.is_array() {
        return serde_json::from_value(value)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())));
    }
    let doc: AnnotationDocument = serde_json::from_value(value)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let gt = GroundTruth::from_document(&doc);
    let mut out = Vec::new();
    for (frame, boxes) in gt.frames() {
        for (id, b) in boxes {
            out.push(Detection::new(frame, *b, 1.0)?.labelled(Some(*id)));
        }
    }
    Ok(out)
}

fn evaluate_one(
    gt_path: &Path,
    pred_path: &Path,
    identity: Option<Identity>,
    costs: UnitCosts,
) -> Result<(MatchReport, EvaluationReport), CliError> {
    let doc: AnnotationDocument = read_json(gt_path)?;
    let mut gt = GroundTruth::from_document(&doc);
    if let Some(id) = identity {
        gt = gt.restrict_to(id);
    }
    let preds = load_predictions(pred_path)?;
    Ok(evaluate(&gt, &preds, costs))
}

fn evaluate_cmd(a: EvaluateArgs) -> CmdResult {
    if a.gt.len() != a.pred.len() {
        return Err(CliError::Validation(format!(
            "{} --gt files but {} --pred files",
            a.gt.len(),
            a.pred.len()
        )));
    }
    if a.jobs == 0 {
        return Err(CliError::validation("--jobs must be at least 1"));
    }
    let identity = a.identity.as_deref().map(parse_identity).transpose()?;
    let costs = match &a.costs {
        Some(p) => read_json::<UnitCosts>(p)?,
        None => UnitCosts::default(),
    };
    let pairs: Vec<(&PathBuf, &PathBuf)> = a.gt.iter().zip(&a.pred).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let results: Vec<(MatchReport, EvaluationReport)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(g, p)| evaluate_one(g, p, identity, costs))
            .collect::<Result<_, _>>()
    })?;

    let total =
        EvaluationReport::from_match(&merge_reports(results.iter().map(|r| r.0.clone())), costs);
    let videos: Vec<_> = pairs
        .iter()
        .zip(&results)
        .map(|((g, p), (_, report))| json!({ "gt": g, "pred": p, "report": report }))
        .collect();
    let out = json!({ "videos": videos, "total": total });

    let row = |name: String, r: &EvaluationReport| {
        vec![
            name,
            r.tp.to_string(),
            r.fp.to_string(),
            r.fn_.to_string(),
            table::opt(r.precision),
            table::opt(r.recall),
            table::opt(r.f1),
            format!("{:.0}", r.workload.total_s),
        ]
    };
    let mut rows: Vec<Vec<String>> = pairs
        .iter()
        .zip(&results)
        .map(|((g, _), (_, r))| row(g.display().to_string(), r))
        .collect();
    if results.len() > 1 {
        rows.push(row("total".into(), &total));
    }
    let human = table::render(
        &[
            "ground truth",
            "tp",
            "fp",
            "fn",
            "precision",
            "recall",
            "f1",
            "workload s",
        ],
        &rows,
    );
    Ok(Rendered::json(&out, human))
}

fn load_timelines(
    runners: &[PathBuf],
    checkpoints: Option<&Path>,
) -> Result<(Vec<RunnerRecord>, Vec<Timeline>), CliError> {
    let checkpoints = match checkpoints {
        Some(p) => load_checkpoints_csv(p)?,
        None => Checkpoint::every_kilometre(),
    };
    let mut records = Vec::new();
    for p in runners {
        records.extend(load_runner_csv(p)?);
    }
    let timelines = records
        .iter()
        .map(|r| compute_timeline(r, &checkpoints))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((records, timelines))
}

fn timeline(a: TimelineArgs) -> CmdResult {
    let (_, timelines) = load_timelines(&a.runners, a.checkpoints.as_deref())?;
    let mut csv_out = Vec::new();
    write_timelines_csv(&timelines, &mut csv_out)?;
    let rows: Vec<Vec<String>> = timelines
        .iter()
        .flat_map(|t| {
            t.entries.iter().map(move |e| {
                vec![
                    t.bib.to_string(),
                    e.location_number.to_string(),
                    format!("{:.1}", e.distance_km),
                    secs(e.estimated_passing_s.round()),
                ]
            })
        })
        .collect();
    Ok(Rendered {
        machine: String::from_utf8(csv_out).expect("csv writer emits UTF-8"),
        human: table::render(&["bib", "location", "km", "passing"], &rows),
    })
}

fn parse_race_time(text: &str) -> Result<f64, CliError> {
    if text.contains(':') {
        return Ok(f64::from(parse_clock_time(text)?));
    }
    text.parse::<f64>()
        .ok()
        .filter(|t| t.is_finite())
        .ok_or_else(|| {
            CliError::Validation(format!("time {text:?} is neither seconds nor H:MM:SS"))
        })
}

fn align_query(a: AlignQueryArgs) -> CmdResult {
    let t = parse_race_time(&a.t)?;
    let (records, timelines) = load_timelines(&a.runners, a.checkpoints.as_deref())?;
    let bibs = time_window_query(&timelines, a.location, t, a.dt)?;
    let out = json!({ "location": a.location, "t": t, "dt": a.dt, "bibs": bibs });
    let rows: Vec<Vec<String>> = bibs
        .iter()
        .map(|bib| {
            let name = records
                .iter()
                .find(|r| r.bib == *bib)
                .map_or("", |r| r.name.as_str());
            let passing = timelines
                .iter()
                .find(|tl| tl.bib == *bib)
                .and_then(|tl| tl.passing_time(a.location))
                .unwrap_or(f64::NAN);
            vec![bib.to_string(), name.to_string(), format!("{passing:.1}")]
        })
        .collect();
    let mut human = table::render(&["bib", "name", "passing s"], &rows);
    human.push_str(&format!(
        "\n{} runners at location {} within {} +/- {} s\n",
        bibs.len(),
        a.location,
        t,
        a.dt
    ));
    Ok(Rendered::json(&out, human))
}

fn parse_box(text: &str) -> Result<BoundingBox, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Validation(format!("--box {text:?} is not four numbers")))?;
    match parts.as_slice() {
        [a, b, c, d] => Ok(BoundingBox::new(*a, *b, *c, *d)?),
        _ => Err(CliError::Validation(format!(
            "--box {text:?} is not four numbers"
        ))),
    }
}

fn reid(a: ReidArgs) -> CmdResult {
    let gallery = load_gallery(&a.gallery)?;
    let probe: Vec<f64> = match (&a.probe_feature, &a.probe_image) {
        (Some(p), _) => read_json(p)?,
        (None, Some(p)) => {
            let bytes = fs::read(p).map_err(|e| CliError::io(p, e))?;
            match a.r#box.as_deref().map(parse_box).transpose()? {
                Some(b) => crop_and_embed(&bytes, &b)?,
                None => baseline_embed(&bytes)?,
            }
        }
        (None, None) => unreachable!("clap requires a probe"),
    };
    let matches = reid_rank(&gallery, &probe, a.k)?;
    let rows: Vec<Vec<String>> = matches
        .iter()
        .enumerate()
        .map(|(i, m)| {
            vec![
                (i + 1).to_string(),
                m.image_id.clone(),
                m.label.map_or("-".into(), |l| l.to_string()),
                format!("{:.4}", m.distance),
            ]
        })
        .collect();
    let human = table::render(&["rank", "image", "label", "distance"], &rows);
    Ok(Rendered::json(&matches, human))
}

fn serve(a: ServeArgs) -> CmdResult {
    let config = ServiceConfig {
        host: a.host,
        port: a.port,
        data_root: a.data_root,
        delta_t_default: a.delta_t,
        reid_top_k: a.reid_top_k,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    runtime.block_on(async {
        let server = marathon_service::Server::bind(&config).await?;
        if let Ok(addr) = server.local_addr() {
            eprintln!("listening on http://{addr}");
        }
        server.run().await.map_err(|e| CliError::Io(e.to_string()))
    })?;
    Ok(Rendered {
        machine: String::new(),
        human: String::new(),
    })
}
