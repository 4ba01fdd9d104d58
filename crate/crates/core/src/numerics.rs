//! Fixed-point grid values, a thin high-precision real type, and the special
//! functions the samplers and statistical checks lean on.
//!
//! Grid values are stored as exact integers over a power-of-two denominator so
//! every comparison made by the samplers is an integer comparison.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::NumericsError;

/// Extra bits carried past the target grid when evaluating transcendental
/// functions inside the samplers.
pub const GUARD_BITS: u32 = 32;

/// Largest grid precision a [`FixedPointValue`] may carry.
pub const MAX_FIXED_BITS: u32 = 126;

/// A dyadic rational `numerator / 2^precision_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPointValue {
    numerator: i128,
    precision_bits: u32,
}

impl FixedPointValue {
    pub fn new(numerator: i128, precision_bits: u32) -> Result<Self, NumericsError> {
        if precision_bits == 0 || precision_bits > MAX_FIXED_BITS {
            return Err(NumericsError::Precision(precision_bits));
        }
        Ok(Self {
            numerator,
            precision_bits,
        })
    }

    pub fn zero(precision_bits: u32) -> Self {
        Self::new(0, precision_bits).expect("precision in range")
    }

    /// `1/2` on the given grid.
    pub fn half(precision_bits: u32) -> Self {
        Self::new(1i128 << (precision_bits - 1), precision_bits).expect("precision in range")
    }

    pub fn one(precision_bits: u32) -> Self {
        Self::new(1i128 << precision_bits, precision_bits).expect("precision in range")
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Lossy once the numerator needs more than 53 significant bits.
    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 * (-(self.precision_bits as f64)).exp2()
    }

    /// Keeps only the first `bits` fractional bits, rounding toward negative
    /// infinity. Increasing the precision is exact.
    pub fn floor_to(&self, bits: u32) -> Result<Self, NumericsError> {
        match bits.cmp(&self.precision_bits) {
            Ordering::Equal => Ok(*self),
            Ordering::Less => Self::new(self.numerator >> (self.precision_bits - bits), bits),
            Ordering::Greater => {
                let shift = bits - self.precision_bits;
                let numerator = self
                    .numerator
                    .checked_mul(1i128 << shift)
                    .ok_or(NumericsError::Overflow)?;
                Self::new(numerator, bits)
            }
        }
    }

    /// Whether the value lies in the closed unit interval.
    pub fn in_unit_interval(&self) -> bool {
        self.numerator >= 0 && self.numerator <= (1i128 << self.precision_bits)
    }
}

impl fmt::Display for FixedPointValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.precision_bits)
    }
}

impl PartialOrd for FixedPointValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FixedPointValue {
    fn cmp(&self, other: &Self) -> Ordering {
        // Compare on the finer grid; numerators are bounded well below the
        // i128 range so lifting the coarser one cannot overflow in practice.
        let bits = self.precision_bits.max(other.precision_bits);
        let a = Integer::from(self.numerator) << (bits - self.precision_bits);
        let b = Integer::from(other.numerator) << (bits - other.precision_bits);
        a.cmp(&b)
    }
}

fn scaled_floor(x: f64, bits: u32) -> Result<i128, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::Domain(format!("non-finite input {x}")));
    }
    // Scaling by a power of two is exact in binary64.
    let y = x * (bits as f64).exp2();
    if y.abs() >= 2f64.powi(126) {
        return Err(NumericsError::Overflow);
    }
    Ok(y.floor() as i128)
}

/// Largest multiple of `2^-bits` not exceeding `x`.
pub fn round_down(x: f64, bits: u32) -> Result<FixedPointValue, NumericsError> {
    FixedPointValue::new(scaled_floor(x, bits)?, bits)
}

/// Nearest multiple of `2^-bits`, ties toward positive infinity.
pub fn round_half_up(x: f64, bits: u32) -> Result<FixedPointValue, NumericsError> {
    let floor = scaled_floor(x, bits)?;
    let y = x * (bits as f64).exp2();
    // The fractional part of a binary64 value is exact.
    let frac = y - y.floor();
    let numerator = if frac >= 0.5 { floor + 1 } else { floor };
    FixedPointValue::new(numerator, bits)
}

/// An MPFR-backed real with an explicit working precision.
///
/// Every operation rounds to nearest at the precision of its left operand, so
/// results are reproducible bit-for-bit across platforms.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct HighPrecisionReal(Float);

impl HighPrecisionReal {
    /// Working precision for a computation whose result lands on a
    /// `2^-grid_bits` grid.
    pub fn working_precision(grid_bits: u32) -> u32 {
        grid_bits + GUARD_BITS
    }

    pub fn from_fixed(value: FixedPointValue, precision: u32) -> Self {
        let mut f = Float::with_val(precision, value.numerator);
        f >>= value.precision_bits;
        Self(f)
    }

    /// `numerator / 2^bits` for an arbitrary-size integer numerator.
    pub fn from_dyadic(numerator: &Integer, bits: u32, precision: u32) -> Self {
        let mut f = Float::with_val(precision, numerator);
        f >>= bits;
        Self(f)
    }

    pub fn from_f64(x: f64, precision: u32) -> Self {
        Self(Float::with_val(precision, x))
    }

    pub fn from_i64(x: i64, precision: u32) -> Self {
        Self(Float::with_val(precision, x))
    }

    pub fn pi(precision: u32) -> Self {
        Self(Float::with_val(precision, Constant::Pi))
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }

    pub fn ln(&self) -> Self {
        Self(self.0.clone().ln())
    }

    pub fn exp(&self) -> Self {
        Self(self.0.clone().exp())
    }

    pub fn sqrt(&self) -> Self {
        Self(self.0.clone().sqrt())
    }

    pub fn cos(&self) -> Self {
        Self(self.0.clone().cos())
    }

    pub fn sin(&self) -> Self {
        Self(self.0.clone().sin())
    }

    pub fn acos(&self) -> Self {
        Self(self.0.clone().acos())
    }

    pub fn square(&self) -> Self {
        Self(self.0.clone().square())
    }

    pub fn abs(&self) -> Self {
        Self(self.0.clone().abs())
    }

    /// Multiplies by `2^k` exactly.
    pub fn shl(&self, k: u32) -> Self {
        Self(self.0.clone() << k)
    }

    /// Divides by `2^k` exactly.
    pub fn shr(&self, k: u32) -> Self {
        Self(self.0.clone() >> k)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        Self(Float::with_val(self.0.prec(), &self.0 / &rhs.0))
    }

    fn scaled_integer(&self, bits: u32, half_up: bool) -> Result<i128, NumericsError> {
        if !self.0.is_finite() {
            return Err(NumericsError::Domain("non-finite high-precision value".into()));
        }
        let mut scaled = self.0.clone() << bits;
        if half_up {
            scaled += 0.5;
        }
        let int = scaled
            .floor()
            .to_integer()
            .ok_or_else(|| NumericsError::Domain("non-finite high-precision value".into()))?;
        int.to_i128().ok_or(NumericsError::Overflow)
    }

    /// `floor(x * 2^bits) / 2^bits`.
    pub fn floor_to_grid(&self, bits: u32) -> Result<FixedPointValue, NumericsError> {
        FixedPointValue::new(self.scaled_integer(bits, false)?, bits)
    }

    /// `floor(x * 2^bits + 1/2) / 2^bits`.
    pub fn round_half_up_to_grid(&self, bits: u32) -> Result<FixedPointValue, NumericsError> {
        FixedPointValue::new(self.scaled_integer(bits, true)?, bits)
    }
}

impl From<Float> for HighPrecisionReal {
    fn from(f: Float) -> Self {
        Self(f)
    }
}

macro_rules! hp_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&HighPrecisionReal> for &HighPrecisionReal {
            type Output = HighPrecisionReal;
            fn $method(self, rhs: &HighPrecisionReal) -> HighPrecisionReal {
                HighPrecisionReal(Float::with_val(self.0.prec(), &self.0 $op &rhs.0))
            }
        }
        impl $trait<f64> for &HighPrecisionReal {
            type Output = HighPrecisionReal;
            fn $method(self, rhs: f64) -> HighPrecisionReal {
                HighPrecisionReal(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
    };
}

hp_binop!(Add, add, +);
hp_binop!(Sub, sub, -);
hp_binop!(Mul, mul, *);

impl Neg for HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn neg(self) -> HighPrecisionReal {
        HighPrecisionReal(-self.0)
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for positive arguments (Lanczos, g = 7).
pub fn ln_gamma(alpha: f64) -> Result<f64, NumericsError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(NumericsError::Domain(format!(
            "ln_gamma requires a positive finite argument, got {alpha}"
        )));
    }
    if alpha < 0.5 {
        // Shift up to stay in the region where the series is most accurate.
        return Ok(ln_gamma(alpha + 1.0)? - alpha.ln());
    }
    let x = alpha - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln())
}

const BETACF_MAX_ITER: usize = 20_000;
const BETACF_EPS: f64 = 1e-14;
const BETACF_FPMIN: f64 = 1e-300;

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64, NumericsError> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < BETACF_FPMIN {
        d = BETACF_FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETACF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < BETACF_FPMIN {
            d = BETACF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < BETACF_FPMIN {
            c = BETACF_FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < BETACF_FPMIN {
            d = BETACF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < BETACF_FPMIN {
            c = BETACF_FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETACF_EPS {
            return Ok(h);
        }
    }
    Err(NumericsError::NoConvergence("incomplete beta continued fraction"))
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64, NumericsError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(NumericsError::Domain(format!(
            "incomplete beta requires a, b > 0, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(NumericsError::Domain(format!(
            "incomplete beta requires x in [0, 1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b)? - ln_gamma(a)? - ln_gamma(b)? + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((front * beta_continued_fraction(a, b, x)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - front * beta_continued_fraction(b, a, 1.0 - x)? / b).clamp(0.0, 1.0))
    }
}
