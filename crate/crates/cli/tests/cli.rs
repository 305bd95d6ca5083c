//! End-to-end tests of the `qivpm` binary against the bundled fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qivpm_core::{spectral_norm, DensityMatrix, Qivpm};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qivpm"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_accepts_and_rejects_the_bundled_measures() {
    for (name, code) in [
        ("mu0.json", 1),
        ("mu1.json", 1),
        ("mu2.json", 1),
        ("mu2prime.json", 0),
        ("mu3.json", 0),
    ] {
        let out = run(&["validate", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(code), "{name}");
    }
}

#[test]
fn rejection_names_an_orthogonal_rank_one_pair() {
    let out = run(&["validate", fixture("mu1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    let measure: Qivpm = serde_json::from_str(
        &std::fs::read_to_string(fixture("mu1.json")).unwrap(),
    )
    .unwrap();
    let named = report["violations"].as_array().unwrap().iter().any(|v| {
        if v["rule"] != "convexity" || v["subject"]["kind"] != "pair" {
            return false;
        }
        let i = v["subject"]["indices"][0].as_u64().unwrap() as usize;
        let j = v["subject"]["indices"][1].as_u64().unwrap() as usize;
        let space = measure.space();
        space.member(i).rank() == 1
            && space.member(j).rank() == 1
            && space.member(i).is_orthogonal_to(space.member(j), 1e-9)
    });
    assert!(named, "no convexity violation names an orthogonal rank-1 pair");
}

#[test]
fn malformed_input_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("truncated.json");
    std::fs::write(&path, "{ \"space\": { \"dim\": 3,").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line") && err.contains("column"), "{err}");

    let missing = run(&["validate", "no/such/file.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn core_reports_empty_for_the_impossible_fixture() {
    let out = run(&["core", fixture("table_nonborn.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let result = stdout_json(&out);
    assert_eq!(result["status"], "empty");
    assert!(result["residual"].as_f64().unwrap() > 1e-4);
}

#[test]
fn core_recovers_the_generating_state_of_a_sharp_measure() {
    let out = run(&["core", fixture("born_sharp.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let result = stdout_json(&out);
    assert_eq!(result["status"], "witness");
    let witness: DensityMatrix = serde_json::from_value(result["rho"].clone()).unwrap();
    let rho: DensityMatrix = serde_json::from_str(
        &std::fs::read_to_string(fixture("born_sharp_rho.json")).unwrap(),
    )
    .unwrap();
    let dist = spectral_norm(&witness.matrix().sub(rho.matrix())).unwrap();
    assert!(dist <= 1e-6, "witness at distance {dist:.3e}");
}

#[test]
fn core_output_is_byte_stable_for_a_fixed_seed() {
    let args = ["core", "--seed", "7"];
    let path = fixture("born_sharp.json");
    let a = bin().args(args).arg(&path).output().unwrap();
    let b = bin().args(args).arg(&path).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn ks_demo_ends_with_the_exhaustive_count() {
    let out = run(&["ks-demo"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .trim_end()
        .ends_with("0 of 512 assignments satisfy all constraints"));
}

#[test]
fn sweep_emits_the_csv_with_the_flip_at_one_third() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "0:1:0.05",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "delta,contextual,evidence");
    assert_eq!(lines.len(), 22); // header + 21 grid rows
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let delta: f64 = fields[0].parse().unwrap();
        let contextual: bool = fields[1].parse().unwrap();
        assert_eq!(contextual, delta < 1.0 / 3.0, "row {line}");
        // the referenced transcript was written alongside the CSV
        let evidence = dir.path().join(format!("{}.txt", fields[2]));
        assert!(evidence.exists(), "missing transcript {}", fields[2]);
    }
}

#[test]
fn classify_reports_one_third_for_the_tight_measure() {
    let out = run(&["classify", fixture("mu2prime.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["delta"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);

    let invalid = run(&["classify", fixture("mu0.json").to_str().unwrap()]);
    assert_eq!(invalid.status.code(), Some(1));
}

#[test]
fn ultra_passes_good_maps_and_fails_the_broken_table() {
    let out = run(&["ultra", "--map", "three-valued"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["valid"], true);

    let broken = format!("table:{}", fixture("table_broken_map.json").display());
    let out = run(&["ultra", "--map", &broken]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["valid"], false);
    assert!(report["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v["rule"] == "ultramodularity"));
}

#[test]
fn gleason_bound_holds_on_the_bundled_probe_space() {
    let out = run(&[
        "gleason",
        fixture("rho_uniform.json").to_str().unwrap(),
        "--map",
        "clamp:0.1",
        "--starts",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["holds"], true);
    assert!(report["max_norm"].as_f64().unwrap() <= 0.100001);
}

#[test]
fn expect_brackets_the_position_observable_on_mu3() {
    let out = run(&[
        "expect",
        fixture("mu3.json").to_str().unwrap(),
        fixture("observable_position.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let lo = v["interval"][0].as_f64().unwrap();
    let hi = v["interval"][1].as_f64().unwrap();
    assert!((lo - 0.5).abs() < 1e-4 && (hi - 1.5).abs() < 1e-4, "[{lo}, {hi}]");

    // an invalid measure surfaces as exit 1
    let invalid = run(&[
        "expect",
        fixture("mu0.json").to_str().unwrap(),
        fixture("observable_position.json").to_str().unwrap(),
    ]);
    assert_eq!(invalid.status.code(), Some(1));

    // an observable whose projectors are not members is a usage error
    let outside = run(&[
        "expect",
        fixture("table_nonborn.json").to_str().unwrap(),
        fixture("observable_position.json").to_str().unwrap(),
    ]);
    assert_eq!(outside.status.code(), Some(2));
}
