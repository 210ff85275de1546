use std::fs;
use std::process::Command;

fn twistee() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twistee"))
}

const SMALL: &str = r#"
[[experiment]]
name = "small"
description = "8x8 vacuum"

[experiment.lattice]
width = 8
height = 8

[[experiment.regions]]
name = "square"
rects = [[2, 2, 3, 3]]
expected_offset = 1

[[experiment.partitions]]
kind = "tripartite"
name = "disk"
origin = [1, 1]
size = [4, 4]
expected = -1
"#;

#[test]
fn run_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("out");
    let status = twistee().arg("run").arg(&cfg).arg("--out").arg(&out).args(["--format", "both"]).status().unwrap();
    assert!(status.success());

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("small.json")).unwrap()).unwrap();
    let r = &json[0];
    assert_eq!(r["experiment"], "small");
    assert_eq!(r["qubits"], 64);
    assert_eq!(r["regions"][0]["entropy_bits"], 5);
    assert_eq!(r["regions"][0]["boundary_length"], 12);
    assert_eq!(r["combinations"][0]["value"], -1);
    assert_eq!(r["combinations"][0]["kind"], "tripartite");

    let csv = fs::read_to_string(out.join("small.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "experiment,region,size,boundary_length,entropy_bits,combination,value,expected,pass"
    );
    assert!(csv.contains("small,square,9,12,5,,,5,true"), "{csv}");
    assert!(csv.contains("disk:s_topo,-1,-1,true"), "{csv}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let run = || twistee().arg("run").arg(&cfg).args(["--format", "csv"]).output().unwrap().stdout;
    assert_eq!(run(), run());
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, SMALL.replace("width = 8", "width = \"eight\"")).unwrap();
    let out = twistee().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("width"), "{err}");
    assert!(err.contains("bad.toml"), "{err}");
}

#[test]
fn failing_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wrong.toml");
    fs::write(&cfg, SMALL.replace("expected = -1", "expected = 0")).unwrap();
    let out = twistee().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAILED"));
}

#[test]
fn no_cross_check_skips_canonical_and_oracle() {
    let out = twistee().args(["run", "oracle-small", "--no-cross-check"]).output().unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for r in json.as_array().unwrap() {
        for c in r["checks"].as_array().unwrap() {
            let name = c["name"].as_str().unwrap();
            assert!(!name.starts_with("canonical") && !name.starts_with("oracle"), "{name}");
        }
    }
}

#[test]
fn oracle_cap_limits_the_dense_check() {
    let out = twistee().args(["run", "oracle-small", "--oracle-cap", "8"]).output().unwrap();
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let plain = &json[0];
    assert_eq!(plain["experiment"], "oracle-plain-4x4");
    assert!(plain["checks"].as_array().unwrap().iter().all(|c| !c["name"].as_str().unwrap().starts_with("oracle")));
}

#[test]
fn export_lattice_lists_twists() {
    let out = twistee().args(["export-lattice", "paper-two-twist-annulus"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("# experiment two-twist-annulus"));
    assert!(text.contains("twist("), "{text}");
}

#[test]
fn export_unknown_experiment_fails() {
    let out = twistee().args(["export-lattice", "paper-vacuum", "--experiment", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn configs_lists_bundled_files() {
    let out = twistee().arg("configs").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("paper-four-twist-x: four-twist-x"));
    assert!(text.contains("oracle-small:"));
}
