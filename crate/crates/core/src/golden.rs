//! Frozen reference vectors for the sampler, the oracle backends and one
//! generated state.
//!
//! Each file is CSV with optional leading `# key=value ...` metadata lines.
//! Checking recomputes every row from its own inputs (tape, index, or the
//! metadata seed) and compares the rendered text, so any change in bit
//! layout, rounding or formatting shows up as a named failing row.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::config::PrecisionConfig;
use crate::error::{ConfigError, Error, Result};
use crate::generator::generate_prs;
use crate::io::{state_to_bytes, StateFormat};
use crate::oracle::{FunctionOracle, PrfKey};
use crate::sampling::{randomness_budget_beta, sample_rounded_beta, BetaSamplerConfig, RandomTape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GoldenKind {
    Sampler,
    OracleRandom,
    OraclePrf,
    State,
}

impl GoldenKind {
    pub const ALL: [GoldenKind; 4] = [Self::Sampler, Self::OracleRandom, Self::OraclePrf, Self::State];

    pub fn file_name(&self) -> &'static str {
        match self {
            Self::Sampler => "sampler.csv",
            Self::OracleRandom => "oracle_random.csv",
            Self::OraclePrf => "oracle_prf.csv",
            Self::State => "state.csv",
        }
    }

    /// The copy compiled into the library.
    pub fn embedded(&self) -> &'static str {
        match self {
            Self::Sampler => include_str!("../golden/sampler.csv"),
            Self::OracleRandom => include_str!("../golden/oracle_random.csv"),
            Self::OraclePrf => include_str!("../golden/oracle_prf.csv"),
            Self::State => include_str!("../golden/state.csv"),
        }
    }

    pub fn from_file_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.file_name() == name)
    }
}

impl fmt::Display for GoldenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_name())
    }
}

impl FromStr for GoldenKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::from_file_name(s).ok_or_else(|| ConfigError::Invalid(format!("unknown golden file {s:?}")))
    }
}

/// `(m, α)` pairs and tapes per pair in the sampler file.
const SAMPLER_CASES: [(u32, u64); 5] = [(1, 1), (4, 1), (8, 2), (8, 4), (12, 8)];
const TAPES_PER_CASE: u64 = 4;

const ORACLE_RANDOM_META: &str = "backend=random n=2 m=1 lambda=4 seed=000102030405060708090a0b0c0d0e0f";
const ORACLE_PRF_META: &str = "backend=prf n=2 m=0 lambda=8 key=a5";
const STATE_META: &str = "backend=random n=2 lambda=4 seed=0000000000000000000000000000000000000000000000000000000000000000";

/// A row that did not reproduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenMismatch {
    pub file: GoldenKind,
    /// 1-based line in the file.
    pub line: usize,
    /// Which vector the row pins, e.g. `index 5`.
    pub label: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for GoldenMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} line {} ({}): file has {:?}, recomputed {:?}",
            self.file, self.line, self.label, self.expected, self.actual
        )
    }
}

fn parse_meta(line: &str) -> Result<BTreeMap<String, String>> {
    line.trim_start_matches('#')
        .split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Format(format!("metadata entry {kv:?} is not key=value")))
        })
        .collect()
}

fn meta_u32(meta: &BTreeMap<String, String>, key: &str) -> Result<u32> {
    meta.get(key)
        .ok_or_else(|| Error::Format(format!("metadata is missing {key}")))?
        .parse()
        .map_err(|e| Error::Format(format!("metadata {key}: {e}")))
}

fn meta_str<'a>(meta: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    meta.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Format(format!("metadata is missing {key}")))
}

fn oracle_from_meta(meta: &BTreeMap<String, String>) -> Result<FunctionOracle> {
    let cfg = PrecisionConfig::new(meta_u32(meta, "n")?, meta.get("m").map_or(Ok(0), |_| meta_u32(meta, "m"))?, meta_u32(meta, "lambda")?)?;
    match meta_str(meta, "backend")? {
        "random" => {
            let seed = hex::decode(meta_str(meta, "seed")?).map_err(|e| Error::Format(format!("seed: {e}")))?;
            Ok(FunctionOracle::truly_random(cfg, &seed))
        }
        "prf" => Ok(FunctionOracle::keyed(PrfKey::from_hex(cfg, meta_str(meta, "key")?)?)),
        other => Err(Error::Format(format!("unknown backend {other:?}"))),
    }
}

fn sampler_row(m: u32, alpha: u64, tape_hex: &str) -> Result<String> {
    let cfg = BetaSamplerConfig::new(m, alpha)?;
    let mut tape = RandomTape::from_hex(tape_hex)?;
    let v = sample_rounded_beta(&cfg, &mut tape)?;
    let k = v.floor_to(m)?.numerator();
    Ok(format!("{m},{alpha},{tape_hex},{k}"))
}

fn oracle_row(oracle: &FunctionOracle, index: u64) -> Result<String> {
    Ok(format!("{index},{}", hex::encode(oracle.eval(index)?)))
}

/// Regenerates the file for `kind` from its fixed inputs.
pub fn render(kind: GoldenKind) -> Result<String> {
    let mut out = String::new();
    match kind {
        GoldenKind::Sampler => {
            out.push_str("# rounded Beta(alpha, alpha) draws; value is k for the grid point k / 2^m\n");
            out.push_str("m,alpha,tape,value\n");
            for (c, &(m, alpha)) in SAMPLER_CASES.iter().enumerate() {
                let bits = randomness_budget_beta(m, alpha)?;
                for t in 0..TAPES_PER_CASE {
                    let mut rng = ChaCha20Rng::seed_from_u64(((c as u64) << 8) | t);
                    let tape = RandomTape::from_rng(&mut rng, bits);
                    out.push_str(&sampler_row(m, alpha, &tape.to_hex())?);
                    out.push('\n');
                }
            }
        }
        GoldenKind::OracleRandom | GoldenKind::OraclePrf => {
            let meta = if kind == GoldenKind::OracleRandom {
                ORACLE_RANDOM_META
            } else {
                ORACLE_PRF_META
            };
            let oracle = oracle_from_meta(&parse_meta(meta)?)?;
            out.push_str(&format!("# {meta}\nindex,output\n"));
            for index in 0..1u64 << oracle.input_bits() {
                out.push_str(&oracle_row(&oracle, index)?);
                out.push('\n');
            }
        }
        GoldenKind::State => {
            out.push_str(&format!("# {STATE_META}\n"));
            out.push_str(&state_text(&parse_meta(STATE_META)?)?);
        }
    }
    Ok(out)
}

fn state_text(meta: &BTreeMap<String, String>) -> Result<String> {
    let state = generate_prs(&oracle_from_meta(meta)?)?;
    String::from_utf8(state_to_bytes(&state, StateFormat::Csv)?).map_err(|e| Error::Format(e.to_string()))
}

/// Recomputes every row of `text` (a `kind` file) from the inputs it records.
pub fn check(kind: GoldenKind, text: &str) -> Result<Vec<GoldenMismatch>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut meta = BTreeMap::new();
    let mut first = 0;
    while first < lines.len() && lines[first].starts_with('#') {
        if lines[first].contains('=') {
            meta = parse_meta(lines[first])?;
        }
        first += 1;
    }
    let header = lines.get(first).copied().unwrap_or_default();
    let want_header = match kind {
        GoldenKind::Sampler => "m,alpha,tape,value",
        GoldenKind::OracleRandom | GoldenKind::OraclePrf => "index,output",
        GoldenKind::State => "index,re,im",
    };
    let mut bad = Vec::new();
    let mismatch = |line: usize, label: String, expected: &str, actual: String| GoldenMismatch {
        file: kind,
        line: line + 1,
        label,
        expected: expected.to_string(),
        actual,
    };
    if header != want_header {
        bad.push(mismatch(first, "header".into(), header, want_header.into()));
        return Ok(bad);
    }
    let rows = &lines[first + 1..];
    if rows.is_empty() {
        bad.push(mismatch(first + 1, "rows".into(), "", "at least one row".into()));
    }
    match kind {
        GoldenKind::Sampler => {
            for (i, row) in rows.iter().enumerate() {
                let line = first + 1 + i;
                let f: Vec<&str> = row.split(',').collect();
                let label = format!("row {}", i + 1);
                let recomputed = match (f.len(), f.first().and_then(|s| s.parse().ok()), f.get(1).and_then(|s| s.parse().ok())) {
                    (4, Some(m), Some(alpha)) => {
                        sampler_row(m, alpha, f[2]).unwrap_or_else(|e| format!("error: {e}"))
                    }
                    _ => "unparseable row".into(),
                };
                if recomputed != *row {
                    bad.push(mismatch(line, format!("{label}, m={} alpha={}", f[0], f.get(1).unwrap_or(&"?")), row, recomputed));
                }
            }
        }
        GoldenKind::OracleRandom | GoldenKind::OraclePrf => {
            let oracle = oracle_from_meta(&meta)?;
            for (i, row) in rows.iter().enumerate() {
                let line = first + 1 + i;
                let index = row.split(',').next().and_then(|s| s.parse::<u64>().ok());
                let recomputed = match index {
                    Some(x) => oracle_row(&oracle, x).unwrap_or_else(|e| format!("error: {e}")),
                    None => "unparseable row".into(),
                };
                if recomputed != *row {
                    let label = index.map_or_else(|| format!("row {}", i + 1), |x| format!("index {x}"));
                    bad.push(mismatch(line, label, row, recomputed));
                }
            }
        }
        GoldenKind::State => {
            let fresh = state_text(&meta)?;
            let fresh: Vec<&str> = fresh.lines().skip(1).collect();
            for i in 0..rows.len().max(fresh.len()) {
                let have = rows.get(i).copied().unwrap_or("");
                let want = fresh.get(i).copied().unwrap_or("");
                if have != want {
                    bad.push(mismatch(first + 1 + i, format!("amplitude {i}"), have, want.to_string()));
                }
            }
        }
    }
    Ok(bad)
}
