use std::path::PathBuf;
use std::process::{Command, Output};

fn nacabe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nacabe"))
        .args(args)
        .env("NACABE_LOG", "off")
        .output()
        .expect("binary runs")
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

#[test]
fn bundled_scenarios_exit_zero() {
    for name in ["mhealth-kp", "cp-flaw"] {
        let out = nacabe(&["run", scenario_path(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let stdout = String::from_utf8(out.stdout).unwrap();
        for line in stdout.lines() {
            serde_json::from_str::<serde_json::Value>(line).expect("every report line is JSON");
        }
        assert!(stdout.lines().last().unwrap().contains("\"event\":\"summary\""));
        assert!(String::from_utf8_lossy(&out.stderr).contains("expectations met"));
    }
}

#[test]
fn bundled_name_resolves_without_a_file() {
    let out = nacabe(&["run", "cp-flaw"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn report_file_matches_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let out = nacabe(&["run", "mhealth-kp", "--seed", "3", "--report", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(a).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(b).unwrap());
}

#[test]
fn wrong_expectation_exits_one_and_names_the_consumption() {
    let text = std::fs::read_to_string(scenario_path("cp-flaw")).unwrap();
    let mut config: serde_json::Value = serde_json::from_str(&text).unwrap();
    config["consumptions"][3]["expected"] = "SUCCESS".into();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wrong.json");
    std::fs::write(&path, config.to_string()).unwrap();
    let out = nacabe(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mismatch: nurse /org/mhealth/diabetes/id123/cgm/blood-glucose/v=1"), "{stderr}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"matched\":false"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"name\": \"x\" ").unwrap();
    assert_eq!(nacabe(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(nacabe(&["run", "/no/such/file.json"]).status.code(), Some(2));

    let text = std::fs::read_to_string(scenario_path("mhealth-kp")).unwrap();
    let mut config: serde_json::Value = serde_json::from_str(&text).unwrap();
    config["abeType"] = "CP".into();
    std::fs::write(&bad, config.to_string()).unwrap();
    let out = nacabe(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrong kind"));
}

#[test]
fn keysize_bench_prints_rows_and_fit() {
    let out = nacabe(&["bench", "keysize", "--abe", "kp", "--max-comparisons", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[2]["comparisons"], 3);
    assert!(lines[3]["fit"]["rSquared"].as_f64().unwrap() > 0.9);
}

#[test]
fn ckcache_bench_compares_against_baseline() {
    let out = nacabe(&["bench", "ckcache", "--items", "250", "--max-items", "100", "--max-age", "3600000"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["cached"]["cksGenerated"], 3);
    assert_eq!(report["baseline"]["cksGenerated"], 250);
    assert_eq!(nacabe(&["bench", "ckcache", "--items", "0"]).status.code(), Some(2));
}
