//! Shared fixtures for the benchmarks.

use haarforge_core::{FunctionOracle, PrecisionConfig};

/// A truly random oracle with a fixed seed.
pub fn fixed_oracle(n: u32, m: u32, lambda: u32) -> FunctionOracle {
    let cfg = PrecisionConfig::new(n, m, lambda).expect("benchmark configuration is valid");
    FunctionOracle::truly_random(cfg, b"haarforge-bench")
}
