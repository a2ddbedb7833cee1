//! End-to-end runs over the checked-in data files.

use std::path::PathBuf;

use marathon_core::alignment::{
    compute_timeline, load_checkpoints_csv, time_window_query, Timeline,
};
use marathon_core::bbox::{evaluate, link_paths_to_detections, GroundTruth, Paths, UnitCosts};
use marathon_core::ingest::read_runner_csv;
use marathon_core::sampling::{
    evaluate_subset, load_scores_csv, locations_for_scores, select_sample_scores, SearchMode,
};
use marathon_core::{AnnotationDocument, Detection};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

#[test]
fn location_scores_table_loads_and_sums() {
    let scores = load_scores_csv(data("location_scores.csv")).unwrap();
    assert_eq!(scores.len(), 35);
    let totals: Vec<u32> = scores.iter().map(|s| s.total).collect();
    let listed = [
        8, 10, 11, 12, 13, 14, 15, 15, 15, 16, 16, 16, 16, 16, 16, 17, 17, 17, 17, 18, 18, 18, 18,
        18, 19, 19, 20, 20, 20, 21, 22, 22, 23, 23, 24,
    ];
    assert_eq!(totals, listed);
    let mut distinct = totals.clone();
    distinct.dedup();
    assert_eq!(distinct.len(), 16);
}

#[test]
fn published_subset_and_search() {
    let scores = load_scores_csv(data("location_scores.csv")).unwrap();
    let totals: Vec<u32> = scores.iter().map(|s| s.total).collect();

    let published = evaluate_subset(&totals, &[11, 15, 16, 17, 19, 23], 1.63).unwrap();
    // 26 / 210, from a brute-force CDF walk over all breakpoints
    assert!((published.statistic - 26.0 / 210.0).abs() < 1e-12);
    assert!(published.accepted);

    let best = select_sample_scores(&totals, 6, 1.63, SearchMode::Exhaustive).unwrap();
    assert_eq!(best.evaluated, 8008);
    assert_eq!(best.subset, [11, 15, 16, 18, 20, 23]);
    assert!((best.ks.statistic - 17.0 / 210.0).abs() < 1e-12);

    let random = select_sample_scores(
        &totals,
        6,
        1.63,
        SearchMode::Random {
            iterations: 10_000,
            seed: 7,
        },
    )
    .unwrap();
    assert!(random.ks.accepted);
    assert!(random.ks.statistic >= best.ks.statistic);

    let locations = locations_for_scores(&scores, &[11, 15, 16, 17, 19, 23]);
    assert_eq!(
        locations,
        [Some(10), Some(11), Some(8), Some(14), Some(18), Some(27)]
    );
}

#[test]
fn runner_timelines_and_window() {
    let csv = "bib,name,gender,countryCode,cumulativeTime_5k,cumulativeTime_10k,cumulativeTime_15k,cumulativeTime_20k,cumulativeTime_half,cumulativeTime_25k,cumulativeTime_30k,cumulativeTime_35k,cumulativeTime_40k,cumulativeTime_finish\n\
        1,Fast,M,KE,0:15:00,0:30:00,0:45:00,1:00:00,1:03:18,1:15:00,1:30:00,1:45:00,2:00:00,2:06:00\n\
        2,Steady,F,NL,0:25:00,0:50:00,1:15:00,,1:45:30,2:05:00,2:30:00,2:55:00,3:20:00,3:30:00\n";
    let records = read_runner_csv(csv.as_bytes()).unwrap();
    let checkpoints = load_checkpoints_csv(data("checkpoints.csv")).unwrap();
    let timelines: Vec<Timeline> = records
        .iter()
        .map(|r| compute_timeline(r, &checkpoints).unwrap())
        .collect();
    assert_eq!(timelines[0].entries.len(), 42);
    assert_eq!(timelines[0].passing_time(5), Some(900.0));
    // 15 -> 21.1 km segment for runner 2 spans the missing 20 km split
    let t20 = timelines[1].passing_time(20).unwrap();
    let expected = 4500.0 + 5.0 / (6.1 / (6330.0 - 4500.0));
    assert!((t20 - expected).abs() < 1e-9);

    let near = time_window_query(&timelines, 10, 1800.0, 60.0).unwrap();
    assert_eq!(near, [1]);
}

#[test]
fn link_then_evaluate() {
    let doc: AnnotationDocument = serde_json::from_str(
        r#"{"video_id":"v","fps_source":30,"tracks":[
            {"identity":"42","keyframes":[{"frame_index":0,"box":[0,0,10,20]},{"frame_index":4,"box":[8,0,18,20]}]}
        ]}"#,
    )
    .unwrap();
    let gt = GroundTruth::from_document(&doc);
    assert_eq!(gt.box_count(), 5);

    let paths: Paths =
        serde_json::from_str(r#"{"42": [[0,5,10],[1,7,10],[2,9,10],[3,11,10],[4,13,10]]}"#)
            .unwrap();
    let detections: Vec<Detection> = serde_json::from_str(
        r#"[
            {"frame_index":0,"box":[0,0,10,20],"confidence":0.9},
            {"frame_index":0,"box":[50,50,60,70],"confidence":0.8},
            {"frame_index":2,"box":[4,0,14,20],"confidence":0.7},
            {"frame_index":4,"box":[8,0,18,20],"confidence":0.9}
        ]"#,
    )
    .unwrap();
    let linked = link_paths_to_detections(&paths, &detections);
    assert_eq!(linked.detections.len(), 3);

    let (_, summary) = evaluate(&gt, &linked.detections, UnitCosts::default());
    assert_eq!((summary.tp, summary.fp, summary.fn_), (3, 0, 2));
    assert_eq!(summary.precision, Some(1.0));
    assert_eq!(summary.recall, Some(0.6));
}
