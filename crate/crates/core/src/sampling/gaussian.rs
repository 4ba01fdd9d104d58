use std::f64::consts::PI;

use rug::Integer;

use crate::error::{NumericsError, SamplingError};
use crate::numerics::{FixedPointValue, HighPrecisionReal, GUARD_BITS};

use super::tape::RandomTape;

/// Bits of uniform randomness behind each Box–Muller coordinate.
pub fn uniform_block_bits(m1: u32) -> u32 {
    m1 + GUARD_BITS
}

/// Tape bits consumed by one rounded Gaussian draw.
pub fn randomness_budget_gaussian(m1: u32) -> usize {
    2 * uniform_block_bits(m1) as usize
}

/// Box–Muller transform of `x ∈ (0, 1]`, `y ∈ [0, 1)`.
pub fn box_muller(x: f64, y: f64) -> Result<(f64, f64), NumericsError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(NumericsError::Domain(format!("box_muller needs x in (0, 1], got {x}")));
    }
    let r = (-2.0 * x.ln()).sqrt();
    let (s, c) = (2.0 * PI * y).sin_cos();
    Ok((r * c, r * s))
}

/// Draws from the standard normal clipped to `[-bound, bound]` (outliers map
/// to 0) and floored to the `2^-m1` grid.
///
/// Reads two `m1 + 32`-bit blocks `N1`, `N2`; `x = (N1 + 1) / 2^k` and
/// `y = N2 / 2^k`, and only the cosine branch `z0` is used.
pub fn sample_rounded_gaussian(
    m1: u32,
    bound: f64,
    tape: &mut RandomTape,
) -> Result<FixedPointValue, SamplingError> {
    if m1 == 0 {
        return Err(SamplingError::InvalidParameter("m1 must be positive".into()));
    }
    if bound.is_nan() || bound <= 0.0 {
        return Err(SamplingError::InvalidParameter(format!("clip bound must be positive, got {bound}")));
    }
    let k = uniform_block_bits(m1) as usize;
    if tape.remaining() < 2 * k {
        return Err(SamplingError::TapeExhausted {
            needed: 2 * k,
            offset: tape.cursor(),
            len: tape.len(),
        });
    }
    let n1 = tape.read(k)?;
    let n2 = tape.read(k)?;
    rounded_gaussian_from_blocks(m1, bound, n1, n2)
}

/// The transform behind [`sample_rounded_gaussian`] applied to two already
/// read uniform blocks.
pub(crate) fn rounded_gaussian_from_blocks(
    m1: u32,
    bound: f64,
    n1: Integer,
    n2: Integer,
) -> Result<FixedPointValue, SamplingError> {
    let k = uniform_block_bits(m1);
    let n1 = n1 + 1u32;
    let prec = HighPrecisionReal::working_precision(m1);
    let x = HighPrecisionReal::from_dyadic(&n1, k, prec);
    let y = HighPrecisionReal::from_dyadic(&n2, k, prec);
    let radius = (&x.ln() * -2.0).sqrt();
    let angle = &(&HighPrecisionReal::pi(prec) * &y) * 2.0;
    let z = &radius * &angle.cos();
    if z.abs().to_f64() > bound {
        return Ok(FixedPointValue::zero(m1));
    }
    Ok(z.floor_to_grid(m1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn box_muller_examples() {
        let (a, b) = box_muller(1.0, 0.7).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        let (a, b) = box_muller((-2.0f64).exp(), 0.0).unwrap();
        assert_abs_diff_eq!(a, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-14);
        let (a, b) = box_muller((-0.5f64).exp(), 0.25).unwrap();
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-14);
        assert!(box_muller(0.0, 0.1).is_err());
    }

    #[test]
    fn all_ones_first_block_gives_zero() {
        // N1 = 2^k - 1 so x = 1 and the radius vanishes.
        let m1 = 16;
        let k = uniform_block_bits(m1) as usize;
        let mut bytes = vec![0xffu8; k / 8];
        bytes.extend(vec![0x5au8; k / 8]);
        let mut tape = RandomTape::from_bytes(bytes);
        let z = sample_rounded_gaussian(m1, 10.0, &mut tape).unwrap();
        assert_eq!(z.numerator(), 0);
        assert_eq!(tape.cursor(), 2 * k);
    }

    #[test]
    fn clipping_maps_to_zero() {
        // N1 = 0 puts x at 2^-k, giving |z| ~ sqrt(2 k ln 2) ~ 7 at y = 0.
        let m1 = 8;
        let k = uniform_block_bits(m1) as usize;
        let bytes = vec![0u8; 2 * k / 8];
        let z = sample_rounded_gaussian(m1, 2.0, &mut RandomTape::from_bytes(bytes.clone())).unwrap();
        assert_eq!(z.numerator(), 0);
        let z = sample_rounded_gaussian(m1, 100.0, &mut RandomTape::from_bytes(bytes)).unwrap();
        let expect = (2.0 * k as f64 * 2f64.ln()).sqrt();
        assert!((z.to_f64() - expect).abs() < 2f64.powi(-(m1 as i32)) + 1e-9);
    }

    #[test]
    fn short_tape_is_rejected() {
        let mut tape = RandomTape::from_bytes(vec![0u8; 4]);
        assert!(sample_rounded_gaussian(10, 4.0, &mut tape).is_err());
    }
}
