//! Pseudorandom quantum state (PRS) and function-like state (PRFS) generators
//! with a finite-precision Beta/Gamma sampling stack, a gate-level
//! cross-check, and statistical verification.

pub mod circuit;
pub mod config;
pub mod error;
pub mod generator;
pub mod golden;
pub mod io;
pub mod numerics;
pub mod oracle;
pub mod sampling;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{FixedPointValue, HighPrecisionReal};
pub use circuit::{run_rs, run_rs_prfs};
pub use config::PrecisionConfig;
pub use generator::{generate_prfs_column, generate_prs, prfs_isometry, StateParams};
pub use oracle::{BackendKind, FunctionOracle, PrfKey};
pub use sampling::RandomTape;
pub use state::StateVector;
pub use verify::{EnsembleReport, EnsembleSource};
