use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_transitmesh");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, passengers: &str, trips: &str) {
    let out = run(&[
        "generate",
        "--passengers",
        passengers,
        "--trips",
        trips,
        "--seed",
        "1",
        "--out",
        s(dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn quick_pipeline(dir: &Path, out: &Path, extra: &[&str]) -> Output {
    let input = dir.join("trajectories.csv");
    let trips = dir.join("trips.csv");
    let mut args = vec![
        "pipeline",
        "--input",
        s(&input),
        "--trips",
        s(&trips),
        "--out",
        s(out),
        "--replicates",
        "200",
        "--seeds",
        "5",
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn generate_writes_two_identical_csvs_on_repeat() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    generate(a.path(), "50", "10");
    generate(b.path(), "50", "10");
    for f in ["trajectories.csv", "trips.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
    assert_eq!(fs::read_dir(a.path()).unwrap().count(), 2);
}

#[test]
fn bad_transfer_probability_exits_2_naming_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--transfer-prob", "1.5", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--transfer-prob"));
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(run(&["pipeline", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn missing_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = run(&[
        "pipeline",
        "--input",
        s(&missing),
        "--trips",
        s(&missing),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_rows_exit_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let legs = dir.path().join("legs.csv");
    let trips = dir.path().join("trips.csv");
    fs::write(&trips, "trip_id,route_id,start_time\nt1,r1,400\n").unwrap();
    fs::write(
        &legs,
        "passenger_id,trip_id,board_time,alight_time\np1,t1,410,430\np2,t1,450,420\n",
    )
    .unwrap();
    let out = run(&[
        "contact",
        "--input",
        s(&legs),
        "--trips",
        s(&trips),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":3:"));
}

#[test]
fn non_increasing_tau_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "40", "8");
    let out = quick_pipeline(dir.path(), &dir.path().join("out"), &["--tau", "5,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--tau"));
}

#[test]
fn too_many_seeds_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "40", "8");
    let out = quick_pipeline(dir.path(), &dir.path().join("out"), &["--seeds", "100000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_thread_count_exits_2() {
    let out = Command::new(BIN)
        .args(["generate", "--passengers", "5", "--trips", "2"])
        .env("TRANSITMESH_THREADS", "zero")
        .current_dir(tempfile::tempdir().unwrap().path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_tau_gives_single_contact_graph() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "60", "10");
    let out_dir = dir.path().join("out");
    let out = quick_pipeline(dir.path(), &out_dir, &["--tau", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let contacts: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("contacts_"))
        .collect();
    assert_eq!(contacts, vec!["contacts_tau0.csv".to_owned()]);
    let m: Value = serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["contact_graphs"].as_array().unwrap().len(), 1);
}

#[test]
fn stage_commands_reproduce_pipeline_outputs() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "120", "15");
    let whole = dir.path().join("whole");
    let out = quick_pipeline(
        dir.path(),
        &whole,
        &["--tau", "0,10", "--analysis-tau", "10", "--rng-seed", "4"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let staged = dir.path().join("staged");
    let input = dir.path().join("trajectories.csv");
    let trips = dir.path().join("trips.csv");
    let common = ["--input", s(&input), "--trips", s(&trips), "--out", s(&staged)];
    let stages: [&[&str]; 5] = [
        &["contact", "--tau", "0,10"],
        &["cliques", "--tau", "10"],
        &["transfer", "--tau", "10"],
        &["community"],
        &[
            "epidemic",
            "--tau",
            "10",
            "--replicates",
            "200",
            "--seeds",
            "5",
            "--rng-seed",
            "4",
        ],
    ];
    for stage in stages {
        let mut args = stage.to_vec();
        args.extend_from_slice(&common);
        let out = run(&args);
        assert!(
            out.status.success(),
            "{stage:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for f in [
        "contacts_tau0.csv",
        "contacts_tau10.csv",
        "groups.csv",
        "transfer_edges.csv",
        "pair_scores.csv",
        "community_edges.csv",
        "communities.json",
        "risk_report.json",
    ] {
        assert_eq!(
            fs::read(whole.join(f)).unwrap(),
            fs::read(staged.join(f)).unwrap(),
            "{f} differs between pipeline and stages"
        );
    }
}

#[test]
fn risk_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "80", "12");
    let out_dir = dir.path().join("out");
    let out = quick_pipeline(dir.path(), &out_dir, &["--per-passenger"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&fs::read(out_dir.join("risk_report.json")).unwrap()).unwrap();
    assert_eq!(r["config"]["replicates"], 200);
    let per_trip = r["per_trip"].as_array().unwrap();
    assert_eq!(per_trip.len(), 12);
    for (i, t) in per_trip.iter().enumerate() {
        assert_eq!(t["rank"], i + 1);
        for key in ["trip_id", "route_id", "start_time", "score"] {
            assert!(t.get(key).is_some(), "missing {key}");
        }
    }
    assert!(!r["per_passenger"].as_array().unwrap().is_empty());
}
