use std::path::Path;
use std::process::{Command, Output};

use decay_cli::formats::{export_radial_csv, ingest_radial_csv, parse_profile, profile_json};
use decay_cli::manifest::RunManifest;
use decay_core::examples::example_v0;
use decay_core::profiles::{Component, PowerSegment, RadialProfile};
use proptest::prelude::*;
use serde_json::Value;

fn decay(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decay")).current_dir(dir).args(args).output().unwrap()
}

fn decay_threads(dir: &Path, threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decay"))
        .current_dir(dir)
        .env("DECAY_THREADS", threads)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

/// Writes the named examples into a fresh directory.
fn workspace(examples: &[(&str, &[&str])]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (file, args) in examples {
        let mut a = vec!["example"];
        a.extend_from_slice(args);
        a.extend_from_slice(&["--out", file]);
        let o = decay(dir.path(), &a);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    dir
}

const V0: (&str, &[&str]) = ("v0.json", &["v0", "--n", "3", "--r", "0", "--depth", "32"]);
const W0: (&str, &[&str]) = ("w0.json", &["w0", "--n", "3", "--r", "0.5", "--k", "40"]);

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() <= tol
}

#[test]
fn example_w0_has_forty_segments() {
    let dir = workspace(&[W0]);
    let p = read_json(&dir.path().join("w0.json"));
    assert_eq!(p["components"][0]["segments"].as_array().unwrap().len(), 40);
    assert_eq!(p["meta"]["family"], "w0");
    let m: RunManifest = serde_json::from_value(read_json(&dir.path().join("w0.json.manifest.json"))).unwrap();
    assert_eq!(m.command, "example");
    assert_eq!(m.outputs.len(), 1);
}

#[test]
fn example_v0_depth_20_has_21_segments() {
    let dir = tempfile::tempdir().unwrap();
    let o = decay(dir.path(), &["example", "v0", "--n", "3", "--r", "0", "--depth", "20"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["components"][0]["segments"].as_array().unwrap().len(), 21);
}

#[test]
fn example_without_n_is_usage() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&decay(dir.path(), &["example", "v0", "--r", "0"])), 2);
    assert_eq!(code(&decay(dir.path(), &["example", "nosuch", "--n", "3"])), 2);
    assert_eq!(code(&decay(dir.path(), &["example", "v0", "--n", "3", "--r", "-2"])), 2);
}

#[test]
fn analyze_finds_the_characters() {
    let dir = workspace(&[V0, W0]);
    let o = decay(dir.path(), &["analyze", "--profile", "v0.json", "--auto"]);
    assert_eq!(code(&o), 0);
    assert!(close(&stdout_json(&o)["character"]["r_star"], 0.0, 0.02));

    let o = decay(dir.path(), &["analyze", "--profile", "w0.json", "--auto", "--out", "aw0"]);
    assert_eq!(code(&o), 0);
    let rep = read_json(&dir.path().join("aw0/report.json"));
    assert!(close(&rep["character"]["r_plus"], 0.5, 0.05));
    assert!(close(&rep["character"]["r_minus"], 2.5, 0.05));
    let m: RunManifest = serde_json::from_value(read_json(&dir.path().join("aw0/manifest.json"))).unwrap();
    assert_eq!(m.outputs.len(), 3);
    assert_eq!(m.inputs.len(), 1);
    for f in &m.outputs {
        assert!(Path::new(&dir.path().join(&f.path)).exists(), "{}", f.path);
    }
    let csv = std::fs::read_to_string(dir.path().join(&m.outputs[1].path)).unwrap();
    assert!(csv.starts_with("log2_rho,log2_phi\n"));
}

#[test]
fn analyze_r_grid_writes_one_csv_per_r() {
    let dir = workspace(&[V0]);
    let o = decay(dir.path(), &["analyze", "--profile", "v0.json", "--r-grid", "-0.5:0.5:0.5", "--out", "a"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["phi_rm0.5.csv", "phi_r0.csv", "phi_r0.5.csv"] {
        assert!(dir.path().join("a").join(f).exists(), "{f}");
    }
}

#[test]
fn corrupt_profile_is_usage_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"n\": 3, \"components\": [").unwrap();
    let o = decay(dir.path(), &["analyze", "--profile", "bad.json", "--auto", "--out", "res"]);
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("res").exists());
    assert_eq!(code(&decay(dir.path(), &["verify", "--profile", "missing.json"])), 2);
}

#[test]
fn spectrum_sets() {
    let dir = workspace(&[V0, W0]);
    let o = decay(dir.path(), &["spectrum", "--profile", "v0.json", "--j", "-60:4", "--sigma", "1.5", "--out", "s"]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(&dir.path().join("s/sets.json"))["sets"]["in_a_cal"], true);
    let csv = std::fs::read_to_string(dir.path().join("s/spectrum.csv")).unwrap();
    assert!(csv.starts_with("j,log2_e_j\n-60,"));
    assert_eq!(csv.lines().count(), 66);

    let o = decay(dir.path(), &["spectrum", "--profile", "w0.json", "--j", "-80:4", "--sigma", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["sets"]["in_a_cal"], false);

    assert_eq!(code(&decay(dir.path(), &["spectrum", "--profile", "v0.json", "--sigma", "0"])), 2);
    assert_eq!(code(&decay(dir.path(), &["spectrum", "--profile", "v0.json", "--sigma", "-1"])), 2);
}

#[test]
fn evolve_fits() {
    let dir =
        workspace(&[("g.json", &["gaussian", "--n", "3"]), ("pp0.json", &["pure_power", "--n", "3", "--r0", "0"])]);
    let o = decay(
        dir.path(),
        &["evolve", "--profile", "g.json", "--alpha", "1", "--c", "1", "--t-decades", "-2:10", "--out", "e"],
    );
    assert_eq!(code(&o), 0);
    assert!(close(&read_json(&dir.path().join("e/fit.json"))["fit"]["sigma_fit"], 0.75, 0.0075));
    let trace = std::fs::read_to_string(dir.path().join("e/trace.csv")).unwrap();
    assert!(trace.starts_with("t,log2_norm\n0,"));

    let o = decay(dir.path(), &["evolve", "--profile", "pp0.json", "--alpha", "0.5", "--c", "1"]);
    assert_eq!(code(&o), 0);
    assert!(close(&stdout_json(&o)["fit"]["sigma_fit"], 1.5, 0.015));

    assert_eq!(code(&decay(dir.path(), &["evolve", "--profile", "pp0.json", "--alpha", "-1"])), 2);
    assert_eq!(code(&decay(dir.path(), &["evolve", "--profile", "pp0.json", "--alpha", "1", "--c", "1,2"])), 2);
}

fn verdicts(rep: &Value) -> Vec<Value> {
    let mut v = vec![
        rep["criterion_indicator"]["verdict"]["verdict"].clone(),
        rep["criterion_set"]["verdict"]["verdict"].clone(),
    ];
    v.extend(rep["criterion_decay"].as_array().unwrap().iter().map(|c| c["verdict"]["verdict"].clone()));
    v
}

#[test]
fn verify_examples() {
    let dir = workspace(&[V0, W0, ("u0log.json", &["u0log", "--n", "3"])]);
    let o = decay(dir.path(), &["verify", "--profile", "v0.json"]);
    assert_eq!(code(&o), 0);
    assert!(verdicts(&stdout_json(&o)).iter().all(|v| v == "true"));

    let o = decay(dir.path(), &["verify", "--profile", "w0.json", "--out", "vw"]);
    assert_eq!(code(&o), 0);
    let rep = read_json(&dir.path().join("vw/report.json"));
    assert_eq!(rep["status"], "consistent");
    assert!(verdicts(&rep).iter().all(|v| v == "false"));

    let o = decay(dir.path(), &["verify", "--profile", "u0log.json"]);
    assert_eq!(code(&o), 0);
    let rep = stdout_json(&o);
    assert!(rep["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("logarithmic")));
    assert_eq!(rep["criterion_navier_stokes"]["verdict"], "unresolved");

    assert_eq!(code(&decay(dir.path(), &["verify", "--profile", "v0.json", "--sigma", "0"])), 2);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = workspace(&[W0]);
    let args = |out: &'static str| vec!["analyze", "--profile", "w0.json", "--r-grid", "0:3:0.5", "--out", out];
    assert_eq!(code(&decay_threads(dir.path(), "1", &args("t1"))), 0);
    assert_eq!(code(&decay_threads(dir.path(), "4", &args("t4"))), 0);
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("t1")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 2);
    for n in names.iter().filter(|n| *n != "manifest.json") {
        let a = std::fs::read(dir.path().join("t1").join(n)).unwrap();
        let b = std::fs::read(dir.path().join("t4").join(n)).unwrap();
        assert_eq!(a, b, "{n:?}");
    }
    assert_eq!(code(&decay_threads(dir.path(), "0", &["verify", "--profile", "w0.json"])), 2);
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = workspace(&[V0]);
    std::fs::write(dir.path().join("file"), "").unwrap();
    assert_eq!(code(&decay(dir.path(), &["analyze", "--profile", "v0.json", "--out", "file/sub"])), 2);
    assert_eq!(code(&decay(dir.path(), &["example", "v0", "--n", "3", "--out", "file/x.json"])), 2);
}

#[test]
fn reproduce_rejects_unknown_suite() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&decay(dir.path(), &["reproduce", "--suite", "unknown", "--out", "r"])), 2);
    assert!(!dir.path().join("r").exists());
}

#[test]
fn reproduce_mirrors_the_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let o = decay(dir.path(), &["reproduce", "--suite", "paper", "--out", "r"]);
    let summary = std::fs::read_to_string(dir.path().join("r/summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    let all_pass = rows.iter().all(|r| r.split(',').nth(2) == Some("pass"));
    assert_eq!(code(&o), if all_pass { 0 } else { 1 });
    let m: RunManifest = serde_json::from_value(read_json(&dir.path().join("r/manifest.json"))).unwrap();
    assert_eq!(m.outputs.len(), 13);
    let oracle = std::fs::read_to_string(dir.path().join("r/oracle.jsonl")).unwrap();
    assert!(oracle.lines().all(|l| serde_json::from_str::<Value>(l).unwrap()["report"]["pass"] == true));
}

#[test]
fn ingest_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text = "log2_lambda,magnitude\n-20,1\n-10,0.5\n-2,0.25\n0,0.125\n";
    std::fs::write(dir.path().join("s.csv"), text).unwrap();
    let o = decay(dir.path(), &["ingest", "csv", "--input", "s.csv", "--n", "3", "--out", "s.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (p, meta) = parse_profile(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert!(meta.is_none());
    let back = export_radial_csv(&p).unwrap();
    let q = ingest_radial_csv(std::str::from_utf8(&back).unwrap(), 3, "sampled").unwrap();
    assert!(q.l2_norm().rel_diff(p.l2_norm()) <= 1e-12);
    assert_eq!(std::str::from_utf8(&back).unwrap(), "log2_lambda,magnitude\n-20,1\n-10,0.5\n-2,0.25\n0,0.125\n");

    std::fs::write(dir.path().join("u.csv"), "log2_lambda,magnitude\n0,1\n-1,1\n").unwrap();
    assert_eq!(code(&decay(dir.path(), &["ingest", "csv", "--input", "u.csv", "--n", "3"])), 2);
}

#[test]
fn ingest_grid_bins_shells() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.json"), r#"{"n": 2, "shape": [16, 16], "dxi": [0.5, 0.5]}"#).unwrap();
    let mut payload = Vec::new();
    for i in 0..16 {
        for j in 0..16 {
            let (x, y) = ((i as f64 - 8.0) * 0.5, (j as f64 - 8.0) * 0.5);
            payload.extend_from_slice(&(-(x * x + y * y) / 2.0).exp().to_le_bytes());
        }
    }
    std::fs::write(dir.path().join("g.bin"), &payload).unwrap();
    let o = decay(dir.path(), &["ingest", "grid", "--header", "g.json", "--payload", "g.bin"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["n"], 2);

    std::fs::write(dir.path().join("short.bin"), &payload[..80]).unwrap();
    assert_eq!(code(&decay(dir.path(), &["ingest", "grid", "--header", "g.json", "--payload", "short.bin"])), 2);
}

#[test]
fn profile_file_keeps_meta() {
    let (p, m) = example_v0(1, 0.0, 32).unwrap();
    let (q, back) = parse_profile(std::str::from_utf8(&profile_json(&p, Some(&m)).unwrap()).unwrap()).unwrap();
    assert_eq!((q, back), (p, Some(m)));
}

fn profiles() -> impl Strategy<Value = RadialProfile> {
    let seg = (0.25f64..6.0, -3.0f64..3.0, -700.0f64..700.0, 0u32..3);
    (1u32..=3, -1e6f64..0.0, -50.0f64..50.0, prop::collection::vec(seg, 0..5)).prop_map(|(n, lo, h0, rest)| {
        let r0 = -(n as f64) / 2.0 + 0.5;
        let mut u = lo;
        let mut segs = vec![PowerSegment::new(f64::NEG_INFINITY, u, h0, r0, 0)];
        for (w, r, h, q) in rest {
            segs.push(PowerSegment::new(u, u + w, h, r, if u + w <= 0.0 { q } else { 0 }));
            u += w;
        }
        RadialProfile::new(n, vec![Component::from_segments(segs)], "prop").unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_json_round_trips_exactly(p in profiles()) {
        let bytes = profile_json(&p, None).unwrap();
        let (q, _) = parse_profile(std::str::from_utf8(&bytes).unwrap()).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(profile_json(&q, None).unwrap(), bytes);
    }
}
