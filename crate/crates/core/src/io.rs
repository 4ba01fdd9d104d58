//! State export formats.
//!
//! * JSON: `{"format": "haarforge-state", "version": 1, "num_qubits": n,
//!   "amplitudes": [[re, im], ...]}`, amplitude of basis index 0 first.
//! * Binary: the 4 bytes `HFSV`, then little-endian `u32` version (1),
//!   `u32` qubit count and a reserved `u32` (0), then `2ⁿ` pairs of
//!   little-endian binary64 `re, im`.
//! * CSV: header `index,re,im`, one row per amplitude, values printed with 17
//!   significant digits.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Error, Result};
use crate::state::StateVector;

pub const STATE_FORMAT_NAME: &str = "haarforge-state";
pub const STATE_FORMAT_VERSION: u32 = 1;
pub const BINARY_MAGIC: &[u8; 4] = b"HFSV";

/// Largest qubit count accepted when reading a state.
const MAX_READ_QUBITS: u32 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StateFormat {
    #[default]
    Json,
    Binary,
    Csv,
}

impl StateFormat {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Binary => "bin",
            Self::Csv => "csv",
        }
    }
}

impl fmt::Display for StateFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "bin" => Ok(Self::Binary),
            "csv" => Ok(Self::Csv),
            other => Err(ConfigError::Invalid(format!(
                "unknown state format {other:?} (expected json, bin or csv)"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    format: String,
    version: u32,
    num_qubits: u32,
    amplitudes: Vec<[f64; 2]>,
}

pub fn write_state<W: Write>(state: &StateVector, format: StateFormat, mut out: W) -> Result<()> {
    match format {
        StateFormat::Json => {
            let file = StateFile {
                format: STATE_FORMAT_NAME.into(),
                version: STATE_FORMAT_VERSION,
                num_qubits: state.num_qubits(),
                amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
            };
            serde_json::to_writer_pretty(&mut out, &file).map_err(|e| Error::Format(e.to_string()))?;
            writeln!(out)?;
        }
        StateFormat::Binary => {
            out.write_all(BINARY_MAGIC)?;
            for word in [STATE_FORMAT_VERSION, state.num_qubits(), 0] {
                out.write_all(&word.to_le_bytes())?;
            }
            for a in state.amplitudes() {
                out.write_all(&a.re.to_le_bytes())?;
                out.write_all(&a.im.to_le_bytes())?;
            }
        }
        StateFormat::Csv => {
            writeln!(out, "index,re,im")?;
            for (i, a) in state.amplitudes().iter().enumerate() {
                writeln!(out, "{i},{:.17e},{:.17e}", a.re, a.im)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn state_to_bytes(state: &StateVector, format: StateFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_state(state, format, &mut buf)?;
    Ok(buf)
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn checked_dim(qubits: u32, found: usize) -> Result<()> {
    if qubits > MAX_READ_QUBITS {
        return Err(format_err(format!("{qubits} qubits exceeds the reader limit of {MAX_READ_QUBITS}")));
    }
    if found != 1usize << qubits {
        return Err(format_err(format!(
            "header says {qubits} qubits but {found} amplitudes follow"
        )));
    }
    Ok(())
}

pub fn read_state<R: Read>(format: StateFormat, mut input: R) -> Result<StateVector> {
    match format {
        StateFormat::Json => {
            let file: StateFile = serde_json::from_reader(input).map_err(|e| format_err(e.to_string()))?;
            if file.format != STATE_FORMAT_NAME || file.version != STATE_FORMAT_VERSION {
                return Err(format_err(format!(
                    "unsupported state file {:?} version {}",
                    file.format, file.version
                )));
            }
            checked_dim(file.num_qubits, file.amplitudes.len())?;
            StateVector::new(file.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        }
        StateFormat::Binary => {
            let mut header = [0u8; 16];
            input.read_exact(&mut header)?;
            if &header[..4] != BINARY_MAGIC {
                return Err(format_err("missing HFSV magic"));
            }
            let word = |k: usize| u32::from_le_bytes(header[4 * k..4 * k + 4].try_into().expect("4 bytes"));
            if word(1) != STATE_FORMAT_VERSION {
                return Err(format_err(format!("unsupported binary state version {}", word(1))));
            }
            let qubits = word(2);
            let mut body = Vec::new();
            input.read_to_end(&mut body)?;
            if body.len() % 16 != 0 {
                return Err(format_err("binary state body is not a whole number of amplitudes"));
            }
            checked_dim(qubits, body.len() / 16)?;
            let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8 bytes"));
            StateVector::new(body.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect())
        }
        StateFormat::Csv => {
            let mut lines = BufReader::new(input).lines();
            match lines.next().transpose()? {
                Some(h) if h.trim() == "index,re,im" => {}
                _ => return Err(format_err("missing index,re,im header")),
            }
            let mut amps = Vec::new();
            for (row, line) in lines.enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format_err(format!("row {row}: {e}")));
                if fields.len() != 3 || fields[0].trim().parse::<usize>().ok() != Some(amps.len()) {
                    return Err(format_err(format!("row {row}: expected index {},re,im", amps.len())));
                }
                amps.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
            }
            let qubits = amps.len().max(1).trailing_zeros();
            checked_dim(qubits, amps.len())?;
            StateVector::new(amps)
        }
    }
}
