use std::fs;
use std::io::Write;
use std::path::Path;

use haarforge_core::circuit::{run_rs, run_rs_prfs};
use haarforge_core::generator::{generate_prfs_column, generate_prs};
use haarforge_core::golden::{check, render, GoldenKind};
use haarforge_core::io::{state_to_bytes, StateFormat};
use haarforge_core::verify::{
    battery_seed, distinguisher_experiment, run_battery, AdvantageReport, Battery, BatteryReport, BatterySettings,
    EnsembleSource, HaarBatteryConfig, RawEnsembleData, REPORT_SCHEMA_VERSION,
};
use haarforge_core::{FunctionOracle, PrecisionConfig, PrfKey, StateVector};
use rand::RngCore;
use serde::Serialize;

use crate::args::{Backend, DistinguishArgs, Expectation, Format, GenerateArgs, GoldenArgs, PathKind, Secrets, Source, VerifyArgs};
use crate::failure::{io_failure, Failure};

/// Seed material of the batteries when none is given.
const DEFAULT_BATTERY_SEED: &str = "00";

fn decode_hex(what: &str, text: &str) -> Result<Vec<u8>, Failure> {
    hex::decode(text.trim()).map_err(|e| Failure::Usage(format!("--{what} is not valid hex: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn fresh_hex(len: usize) -> String {
    let mut bytes = vec![0u8; len];
    rand::rng().fill_bytes(&mut bytes);
    hex::encode(bytes)
}

fn build_oracle(cfg: PrecisionConfig, backend: Backend, secrets: &Secrets) -> Result<FunctionOracle, Failure> {
    match backend {
        Backend::Random => {
            let seed = match (&secrets.seed, secrets.fresh_entropy) {
                (Some(s), _) => s.clone(),
                (None, true) => {
                    let s = fresh_hex(32);
                    eprintln!("fresh entropy (NOT reproducible): seed = {s}");
                    s
                }
                (None, false) => {
                    return Err(Failure::Usage(
                        "the random backend needs --seed HEX (or HAARFORGE_SEED, or --fresh-entropy)".into(),
                    ))
                }
            };
            Ok(FunctionOracle::truly_random(cfg, &decode_hex("seed", &seed)?))
        }
        Backend::Prf => {
            let key = match (&secrets.key, secrets.fresh_entropy) {
                (Some(k), _) => k.clone(),
                (None, true) => {
                    let k = fresh_hex(PrfKey::material_bytes(cfg.lambda));
                    eprintln!("fresh entropy (NOT reproducible): key = {k}");
                    k
                }
                (None, false) => {
                    return Err(Failure::Usage(
                        "the prf backend needs --key HEX (or HAARFORGE_KEY, or --fresh-entropy)".into(),
                    ))
                }
            };
            let material = decode_hex("key", &key)?;
            Ok(FunctionOracle::keyed(PrfKey::from_material(cfg, &material).map_err(|e| Failure::Usage(e.to_string()))?))
        }
    }
}

fn state_format(f: Format) -> StateFormat {
    match f {
        Format::Json => StateFormat::Json,
        Format::Bin => StateFormat::Binary,
        Format::Csv => StateFormat::Csv,
    }
}

#[derive(Serialize)]
struct GenerateSummary {
    schema_version: u32,
    n: u32,
    m: u32,
    lambda: u32,
    x: Option<u64>,
    norm: f64,
    amplitudes: Vec<[f64; 2]>,
    out: Option<String>,
}

pub fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let cfg = PrecisionConfig::new(args.n, args.m, args.lambda)?;
    let oracle = build_oracle(cfg, args.backend, &args.secrets)?;
    let x = (args.m > 0).then_some(args.x);
    if let Some(x) = x {
        if x >> args.m != 0 {
            return Err(Failure::Usage(format!("--x {x} does not fit in m = {} bits", args.m)));
        }
    }
    let state: StateVector = match (args.path, x) {
        (PathKind::Direct, None) => generate_prs(&oracle)?,
        (PathKind::Direct, Some(x)) => generate_prfs_column(&oracle, x)?,
        (PathKind::Circuit, None) => run_rs(&oracle)?,
        (PathKind::Circuit, Some(x)) => {
            let input = StateVector::basis(args.m, x as usize)?;
            let full = run_rs_prfs(&oracle, &input)?;
            let dim = 1usize << args.n;
            let start = x as usize * dim;
            StateVector::new(full.amplitudes()[start..start + dim].to_vec())?
        }
    };
    if let Some(path) = &args.out {
        write_file(path, &state_to_bytes(&state, state_format(args.format))?)?;
    }
    let shown: Vec<[f64; 2]> = state.amplitudes().iter().take(args.show).map(|a| [a.re, a.im]).collect();
    if args.json {
        let summary = GenerateSummary {
            schema_version: REPORT_SCHEMA_VERSION,
            n: args.n,
            m: args.m,
            lambda: args.lambda,
            x,
            norm: state.norm(),
            amplitudes: shown,
            out: args.out.as_ref().map(|p| p.display().to_string()),
        };
        println!("{}", to_json(&summary));
    } else {
        println!("norm {:.15}", state.norm());
        for (i, [re, im]) in shown.iter().enumerate() {
            println!("amplitude[{i}] = {re:+.12} {im:+.12}i");
        }
        if state.dim() > shown.len() {
            println!("({} more amplitudes)", state.dim() - shown.len());
        }
        if let Some(path) = &args.out {
            println!("wrote {} ({})", path.display(), state_format(args.format));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GoldenResult {
    file: String,
    passed: bool,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    schema_version: u32,
    passed: bool,
    batteries: Vec<BatteryReport>,
    golden: Vec<GoldenResult>,
}

fn check_golden(dir: Option<&Path>) -> Result<Vec<GoldenResult>, Failure> {
    let mut out = Vec::new();
    for kind in GoldenKind::ALL {
        let text = match dir {
            Some(d) => {
                let path = d.join(kind.file_name());
                fs::read_to_string(&path).map_err(|e| io_failure(&path, e))?
            }
            None => kind.embedded().to_string(),
        };
        let failures: Vec<String> = match check(kind, &text) {
            Ok(bad) => bad.iter().map(ToString::to_string).collect(),
            Err(e) => vec![format!("{kind}: {e}")],
        };
        out.push(GoldenResult {
            file: kind.file_name().into(),
            passed: failures.is_empty(),
            failures,
        });
    }
    Ok(out)
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let (batteries, golden) = match args.battery.as_str() {
        "all" => (Battery::ALL.to_vec(), true),
        "golden" => (Vec::new(), true),
        name => (vec![name.parse::<Battery>()?], false),
    };
    let cfg = PrecisionConfig::prs(args.n, args.lambda)?;
    let seed = battery_seed(&decode_hex("seed", args.seed.as_deref().unwrap_or(DEFAULT_BATTERY_SEED))?);
    let source = match args.backend {
        Backend::Random => EnsembleSource::Random,
        Backend::Prf => EnsembleSource::Prf,
    };
    let mut settings = BatterySettings::new(cfg, source, seed);
    settings.haar = HaarBatteryConfig {
        ensemble_size: args.ensemble,
        marginal_size: args.marginal,
    };
    settings.trials = args.trials;
    settings.isometry_trials = (args.trials / 5).max(1);
    settings.sampler_draws = args.draws;

    let mut reports = Vec::new();
    let mut raw: Option<RawEnsembleData> = None;
    for b in batteries {
        let (report, data) = run_battery(b, &settings)?;
        if !args.json {
            println!("{:<17} {}", b.name(), if report.passed() { "PASS" } else { "FAIL" });
            for v in &report.verdicts {
                println!("  {:<24} {} {}", v.name, if v.passed { "ok  " } else { "FAIL" }, v.detail);
            }
        }
        raw = raw.or(data);
        reports.push(report);
    }
    let golden = if golden { check_golden(args.golden_dir.as_deref())? } else { Vec::new() };
    if !args.json {
        for g in &golden {
            println!("golden {:<17} {}", g.file, if g.passed { "PASS" } else { "FAIL" });
            for f in &g.failures {
                println!("  {f}");
            }
        }
    }
    let passed = reports.iter().all(BatteryReport::passed) && golden.iter().all(|g| g.passed);
    let report = VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        passed,
        batteries: reports,
        golden,
    };
    if let Some(path) = &args.out {
        write_file(path, to_json(&report).as_bytes())?;
    }
    if let Some(path) = &args.csv {
        let data = raw.ok_or_else(|| Failure::Usage("--csv needs the haar-moments battery".into()))?;
        let mut buf = Vec::new();
        data.write_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    if args.json {
        println!("{}", to_json(&report));
    }
    if passed {
        Ok(())
    } else {
        let mut failed: Vec<String> = report
            .batteries
            .iter()
            .flat_map(|b| b.failures().map(move |v| format!("{}/{}: {}", b.battery, v.name, v.detail)))
            .collect();
        failed.extend(report.golden.iter().flat_map(|g| g.failures.iter().cloned()));
        Err(Failure::Check(failed.join("; ")))
    }
}

fn source(s: Source) -> EnsembleSource {
    match s {
        Source::Haar => EnsembleSource::Haar,
        Source::Random => EnsembleSource::Random,
        Source::Prf => EnsembleSource::Prf,
        Source::BrokenPhase => EnsembleSource::BrokenPhase,
    }
}

fn print_advantage(r: &AdvantageReport) {
    println!("{} vs {} at n = {}, lambda = {}, {} states each", r.source_a, r.source_b, r.n, r.lambda, r.trials);
    for t in &r.tests {
        println!(
            "  {:<14} KS distance {:.4} (band {:.4}, p = {:.3e})",
            t.name, t.statistic, t.ci_half_width, t.p_value
        );
    }
    println!("advantage {:.4} ± {:.4}; lower limit {:.4}", r.advantage, r.ci_half_width, r.advantage_lower);
    println!("bound for l = {}: {:.6}", r.queries, r.bound);
    println!("consistent with zero: {}; within bound: {}", r.consistent_with_zero, r.within_bound);
    println!("note: {}", r.note);
}

pub fn distinguish(args: &DistinguishArgs) -> Result<(), Failure> {
    let cfg = PrecisionConfig::prs(args.n, args.lambda)?;
    let seed = battery_seed(&decode_hex("seed", args.seed.as_deref().unwrap_or(DEFAULT_BATTERY_SEED))?);
    let report = distinguisher_experiment(
        cfg,
        source(args.backend_a),
        source(args.backend_b),
        args.queries,
        args.ensemble,
        &seed,
    )?;
    if let Some(path) = &args.out {
        write_file(path, to_json(&report).as_bytes())?;
    }
    if args.json {
        println!("{}", to_json(&report));
    } else {
        print_advantage(&report);
    }
    match args.expect {
        Some(Expectation::Indistinguishable) if !report.consistent_with_zero => Err(Failure::Check(format!(
            "advantage {:.4} exceeds its band {:.4}",
            report.advantage, report.ci_half_width
        ))),
        Some(Expectation::Distinguishable) if report.consistent_with_zero => Err(Failure::Check(format!(
            "advantage {:.4} is inside its band {:.4}",
            report.advantage, report.ci_half_width
        ))),
        _ => Ok(()),
    }
}

pub fn golden(args: &GoldenArgs) -> Result<(), Failure> {
    fs::create_dir_all(&args.out).map_err(|e| io_failure(&args.out, e))?;
    for kind in GoldenKind::ALL {
        let path = args.out.join(kind.file_name());
        write_file(&path, render(kind)?.as_bytes())?;
        println!("wrote {}", path.display());
    }
    std::io::stdout().flush().map_err(|e| Failure::Io(e.to_string()))
}
