//! The shipped reference vectors reproduce exactly.

use haarforge_core::circuit::run_rs;
use haarforge_core::golden::{check, render, GoldenKind};
use haarforge_core::io::{read_state, StateFormat};
use haarforge_core::verify::trace_distance_pure;
use haarforge_core::{FunctionOracle, PrecisionConfig};

#[test]
fn shipped_files_match_a_fresh_rendering() {
    for kind in GoldenKind::ALL {
        assert_eq!(render(kind).unwrap(), kind.embedded(), "{kind}");
    }
}

#[test]
fn shipped_files_recompute_row_by_row() {
    for kind in GoldenKind::ALL {
        let bad = check(kind, kind.embedded()).unwrap();
        assert!(bad.is_empty(), "{kind}: {}", bad[0]);
    }
}

#[test]
fn corrupted_rows_are_named() {
    let text = GoldenKind::OraclePrf.embedded();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = &mut lines[5];
    let last = row.pop().unwrap();
    row.push(if last == '0' { '1' } else { '0' });
    let bad = check(GoldenKind::OraclePrf, &(lines.join("\n") + "\n")).unwrap();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].line, 6);
    assert_eq!(bad[0].label, "index 3");
    assert!(bad[0].to_string().contains("oracle_prf.csv line 6 (index 3)"));

    let sampler = GoldenKind::Sampler.embedded().replacen(",0\n", ",1\n", 1);
    let bad = check(GoldenKind::Sampler, &sampler).unwrap();
    assert_eq!(bad.len(), 1);
    assert!(bad[0].label.starts_with("row "), "{}", bad[0].label);
}

#[test]
fn pinned_state_agrees_with_the_circuit() {
    let text = GoldenKind::State.embedded();
    let body: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let pinned = read_state(StateFormat::Csv, body.as_bytes()).unwrap();
    let cfg = PrecisionConfig::prs(2, 4).unwrap();
    let oracle = FunctionOracle::truly_random(cfg, &[0u8; 32]);
    let circuit = run_rs(&oracle).unwrap();
    assert!(trace_distance_pure(&pinned, &circuit).unwrap() <= 1e-9);
}
