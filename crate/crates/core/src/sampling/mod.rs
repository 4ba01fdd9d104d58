//! Deterministic samplers driven by explicit random tapes.
//!
//! Tape layout for one rounded Beta draw with output grid `m` and internal
//! precision `m1`: `2m` consecutive pairs, each holding a Gaussian block
//! (two `m1 + 32`-bit uniforms) followed by an `m1`-bit uniform. Pair `k`
//! (0-based) feeds the first Gamma draw when `k` is even and the second when
//! it is odd.

mod beta;
mod eta;
mod gamma;
mod gaussian;
mod tape;

pub use beta::{
    beta_sample_b1, beta_sample_b3, decode_beta_tape, randomness_budget_beta, rounded_beta_masses,
    sample_rounded_beta, BetaSamplerConfig, MAX_GRID_BITS,
};
pub use eta::{eta_bound, eta_raw, internal_bits, max_abs_f_prime, ETA_SAFETY};
pub use gamma::{checker_c, gamma_sample_mt, GammaEnvelopeConsts, GammaKernel};
pub use gaussian::{box_muller, randomness_budget_gaussian, sample_rounded_gaussian, uniform_block_bits};
pub use tape::RandomTape;
