use serde::{Deserialize, Serialize};

use crate::error::{NumericsError, SamplingError};
use crate::numerics::{regularized_incomplete_beta, FixedPointValue, HighPrecisionReal};

use super::eta::{eta_bound, internal_bits};
use super::gamma::{gamma_sample_mt, GammaKernel};
use super::gaussian::{randomness_budget_gaussian, rounded_gaussian_from_blocks, uniform_block_bits};
use super::tape::RandomTape;

/// Largest output grid supported; keeps every internal numerator inside i128.
pub const MAX_GRID_BITS: u32 = 36;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSamplerConfig {
    /// Output grid bits; also the retry budget per Gamma draw.
    pub m: u32,
    pub alpha: u64,
    /// Internal grid bits for the Gaussian and uniform inputs.
    pub m1: u32,
    pub eta: f64,
}

impl BetaSamplerConfig {
    pub fn new(m: u32, alpha: u64) -> Result<Self, SamplingError> {
        if m == 0 || m > MAX_GRID_BITS {
            return Err(SamplingError::InvalidParameter(format!(
                "beta grid bits must be in 1..={MAX_GRID_BITS}, got {m}"
            )));
        }
        if alpha == 0 {
            return Err(SamplingError::InvalidParameter("beta shape must be >= 1".into()));
        }
        Ok(Self {
            m,
            alpha,
            m1: internal_bits(m),
            eta: eta_bound(),
        })
    }

    /// Gaussian clip bound `2m`.
    pub fn clip_bound(&self) -> f64 {
        2.0 * self.m as f64
    }

    /// Tape bits of one `(x_i, u_i)` pair.
    pub fn pair_bits(&self) -> usize {
        randomness_budget_gaussian(self.m1) + self.m1 as usize
    }

    pub fn working_precision(&self) -> u32 {
        HighPrecisionReal::working_precision(self.m1)
    }
}

/// Tape bits consumed by one rounded Beta draw: `2m` pairs laid out as
/// `x_1, u_1, x_2, u_2, ...`.
pub fn randomness_budget_beta(m: u32, alpha: u64) -> Result<usize, SamplingError> {
    let cfg = BetaSamplerConfig::new(m, alpha)?;
    Ok(2 * m as usize * cfg.pair_bits())
}

/// Binary64 Beta sampler from `2m` Gaussian/uniform pairs. Pairs with even
/// 0-based index feed the first Gamma draw, odd ones the second.
pub fn beta_sample_b1(m: u32, alpha: u64, xs: &[f64], us: &[f64]) -> Result<Option<f64>, SamplingError> {
    let rounds = m as usize;
    if xs.len() != 2 * rounds || us.len() != 2 * rounds {
        return Err(SamplingError::InvalidParameter(format!(
            "expected {} inputs of each kind, got {} and {}",
            2 * rounds,
            xs.len(),
            us.len()
        )));
    }
    let alpha = alpha as f64;
    let draw = |parity: usize| (0..rounds).find_map(|i| gamma_sample_mt(alpha, xs[2 * i + parity], us[2 * i + parity]));
    match (draw(0), draw(1)) {
        (Some(a), Some(b)) => Ok(Some(a / (a + b))),
        _ => Ok(None),
    }
}

fn finish(cfg: &BetaSamplerConfig, a: Option<HighPrecisionReal>, b: Option<HighPrecisionReal>) -> Result<FixedPointValue, NumericsError> {
    match (a, b) {
        (Some(a), Some(b)) => a.div(&(&a + &b)).round_half_up_to_grid(cfg.m),
        _ => Ok(FixedPointValue::half(cfg.m)),
    }
}

/// Fixed-point Beta sampler on grid inputs; total, falling back to `1/2`
/// when either retry loop runs out.
pub fn beta_sample_b3(
    cfg: &BetaSamplerConfig,
    xs: &[FixedPointValue],
    us: &[FixedPointValue],
) -> Result<FixedPointValue, SamplingError> {
    let rounds = cfg.m as usize;
    if xs.len() != 2 * rounds || us.len() != 2 * rounds {
        return Err(SamplingError::InvalidParameter(format!(
            "expected {} inputs of each kind, got {} and {}",
            2 * rounds,
            xs.len(),
            us.len()
        )));
    }
    let kernel = GammaKernel::new(cfg.alpha, cfg.working_precision())?;
    let draw = |parity: usize| -> Result<Option<HighPrecisionReal>, SamplingError> {
        for i in 0..rounds {
            let k = 2 * i + parity;
            if let Some(v) = kernel.sample_grid(cfg.m1, xs[k], us[k])? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    };
    let a = draw(0)?;
    let b = draw(1)?;
    Ok(finish(cfg, a, b)?)
}

/// Decodes pair `k` of a Beta tape segment starting at `base`.
fn decode_pair(
    cfg: &BetaSamplerConfig,
    tape: &RandomTape,
    base: usize,
    k: usize,
) -> Result<(FixedPointValue, FixedPointValue), SamplingError> {
    let start = base + k * cfg.pair_bits();
    let block = uniform_block_bits(cfg.m1) as usize;
    let n1 = tape.bits_at(start, block)?;
    let n2 = tape.bits_at(start + block, block)?;
    let x = rounded_gaussian_from_blocks(cfg.m1, cfg.clip_bound(), n1, n2)?;
    let gauss_bits = 2 * block;
    let raw_u = tape.bits_at(start + gauss_bits, cfg.m1 as usize)?;
    // The all-zero block is moved to the smallest positive grid point so ln u stays finite.
    let num = raw_u.to_i128().ok_or(NumericsError::Overflow)?.max(1);
    let u = FixedPointValue::new(num, cfg.m1)?;
    Ok((x, u))
}

/// Rounded Beta(alpha, alpha) draw on the `2^-m` grid.
///
/// Consumes exactly [`randomness_budget_beta`] bits. Pairs are decoded only
/// when a retry loop reaches them, so accepted-early draws stay cheap.
pub fn sample_rounded_beta(cfg: &BetaSamplerConfig, tape: &mut RandomTape) -> Result<FixedPointValue, SamplingError> {
    let rounds = cfg.m as usize;
    let budget = 2 * rounds * cfg.pair_bits();
    let base = tape.cursor();
    if tape.remaining() < budget {
        return Err(SamplingError::TapeExhausted {
            needed: budget,
            offset: base,
            len: tape.len(),
        });
    }
    let kernel = GammaKernel::new(cfg.alpha, cfg.working_precision())?;
    let draw = |parity: usize| -> Result<Option<HighPrecisionReal>, SamplingError> {
        for i in 0..rounds {
            let (x, u) = decode_pair(cfg, tape, base, 2 * i + parity)?;
            if let Some(v) = kernel.sample_grid(cfg.m1, x, u)? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    };
    let a = draw(0)?;
    let b = draw(1)?;
    tape.skip(budget)?;
    Ok(finish(cfg, a, b)?)
}

/// Decodes every pair of a Beta tape segment, for inspection and testing.
pub fn decode_beta_tape(
    cfg: &BetaSamplerConfig,
    tape: &RandomTape,
) -> Result<(Vec<FixedPointValue>, Vec<FixedPointValue>), SamplingError> {
    let base = tape.cursor();
    let (mut xs, mut us) = (Vec::new(), Vec::new());
    for k in 0..2 * cfg.m as usize {
        let (x, u) = decode_pair(cfg, tape, base, k)?;
        xs.push(x);
        us.push(u);
    }
    Ok((xs, us))
}

/// Exact probabilities of each grid point `k / 2^m` under the Beta(alpha,
/// alpha) law rounded half up to the `2^-m` grid.
pub fn rounded_beta_masses(m: u32, alpha: f64) -> Result<Vec<f64>, NumericsError> {
    let cells = 1usize << m;
    let scale = cells as f64;
    let mut cdf = Vec::with_capacity(cells + 1);
    for k in 0..=cells {
        let edge = ((k as f64 + 0.5) / scale).min(1.0);
        cdf.push(regularized_incomplete_beta(alpha, alpha, edge)?);
    }
    let mut masses = Vec::with_capacity(cells + 1);
    masses.push(cdf[0]);
    for k in 1..=cells {
        masses.push((cdf[k] - cdf[k - 1]).max(0.0));
    }
    Ok(masses)
}
