use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn haarforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haarforge"))
        .args(args)
        .env_remove("HAARFORGE_SEED")
        .env_remove("HAARFORGE_KEY")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn keyed_generation_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["json", "bin", "csv"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for out in [&a, &b] {
            let o = haarforge(&[
                "generate", "--n", "3", "--lambda", "16", "--backend", "prf", "--key", "0badc0de", "--out",
                path_str(out), "--format", format,
            ]);
            assert_eq!(code(&o), 0, "{}", stderr(&o));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{format}");
    }
}

#[test]
fn frozen_state_file_is_reproduced() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("state.json");
    let seed = "0".repeat(64);
    let o = haarforge(&[
        "generate", "--n", "1", "--lambda", "8", "--backend", "random", "--seed", &seed, "--out", path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let frozen = include_bytes!("data/n1_lambda8_random_zero_seed.json");
    assert_eq!(fs::read(&out).unwrap(), frozen);
}

#[test]
fn circuit_and_direct_paths_print_the_same_amplitudes() {
    let run = |path: &str| {
        let o = haarforge(&[
            "generate", "--n", "2", "--m", "1", "--x", "1", "--lambda", "6", "--seed", "07", "--path", path, "--json",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["amplitudes"].as_array().unwrap().iter().flat_map(|a| [a[0].as_f64().unwrap(), a[1].as_f64().unwrap()]).collect::<Vec<_>>()
    };
    let (d, c) = (run("direct"), run("circuit"));
    assert_eq!(d.len(), 8);
    for (x, y) in d.iter().zip(&c) {
        assert!((x - y).abs() < 1e-9, "{d:?} vs {c:?}");
    }
}

#[test]
fn missing_secrets_are_usage_errors() {
    let o = haarforge(&["generate", "--n", "2", "--lambda", "8", "--backend", "prf"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--key"), "{}", stderr(&o));

    let o = haarforge(&["generate", "--n", "2", "--lambda", "8", "--backend", "random"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--seed"), "{}", stderr(&o));

    let o = haarforge(&["generate", "--n", "2", "--lambda", "8", "--seed", "xyz"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_configuration_is_a_usage_error() {
    let o = haarforge(&["generate", "--n", "0", "--lambda", "8", "--seed", "00"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = haarforge(&["generate", "--n", "2", "--m", "1", "--x", "2", "--lambda", "8", "--seed", "00"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn fresh_entropy_announces_its_seed() {
    let o = haarforge(&["generate", "--n", "2", "--lambda", "8", "--fresh-entropy"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("NOT reproducible"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("state.json");
    let o = haarforge(&["generate", "--n", "2", "--lambda", "8", "--seed", "00", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn golden_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let o = haarforge(&["golden", "--out", path_str(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let o = haarforge(&["verify", "--battery", "golden", "--golden-dir", path_str(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let file = dir.path().join("oracle_prf.csv");
    let text = fs::read_to_string(&file).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let last = lines.last_mut().unwrap();
    let flipped = if last.ends_with('0') { '1' } else { '0' };
    last.pop();
    last.push(flipped);
    fs::write(&file, lines.join("\n") + "\n").unwrap();

    let o = haarforge(&["verify", "--battery", "golden", "--golden-dir", path_str(dir.path())]);
    assert_eq!(code(&o), 1);
    let all = stdout(&o) + &stderr(&o);
    assert!(all.contains("oracle_prf.csv"), "{all}");
    assert!(all.contains("index"), "{all}");
}

#[test]
fn lemma_battery_passes_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = haarforge(&["verify", "--battery", "lemma-bounds", "--trials", "1000", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["batteries"][0]["battery"], "lemma-bounds");
}

#[test]
fn unknown_battery_is_a_usage_error() {
    let o = haarforge(&["verify", "--battery", "nonsense"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn moment_battery_writes_raw_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("raw.csv");
    let o = haarforge(&[
        "verify", "--battery", "haar-moments", "--ensemble", "300", "--marginal", "1000", "--csv", path_str(&csv),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("kind,index,value\n"));
    assert!(text.lines().count() > 1000);
}

#[test]
fn same_source_distinguisher_is_consistent_with_zero() {
    let o = haarforge(&[
        "distinguish", "--backend-a", "prf", "--backend-b", "random", "--expect", "indistinguishable", "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["consistent_with_zero"], true);
    assert!(r["bound"].as_f64().unwrap() < 0.03);
}

#[test]
fn broken_phase_is_caught() {
    let o = haarforge(&["distinguish", "--backend-a", "broken-phase", "--backend-b", "haar", "--json"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["advantage"].as_f64().unwrap() > 0.2, "{r}");
    assert_eq!(r["within_bound"], false);

    let o = haarforge(&["distinguish", "--backend-a", "broken-phase", "--backend-b", "haar", "--expect", "indistinguishable"]);
    assert_eq!(code(&o), 1);
}
