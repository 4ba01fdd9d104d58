use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::SamplingError;
use crate::numerics::{ln_gamma, FixedPointValue, HighPrecisionReal};

/// Constants of the Marsaglia–Tsang squeeze for shape `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEnvelopeConsts {
    pub alpha: f64,
    pub d: f64,
    pub c: f64,
}

impl GammaEnvelopeConsts {
    pub fn new(alpha: f64) -> Result<Self, SamplingError> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(SamplingError::InvalidParameter(format!(
                "gamma shape must be a finite value >= 1, got {alpha}"
            )));
        }
        let d = alpha - 1.0 / 3.0;
        Ok(Self {
            alpha,
            d,
            c: 1.0 / (9.0 * d).sqrt(),
        })
    }

    /// Builds the constants directly from `c`, for sweeps over the envelope family.
    pub fn from_c(c: f64) -> Self {
        let d = 1.0 / (9.0 * c * c);
        Self {
            alpha: d + 1.0 / 3.0,
            d,
            c,
        }
    }

    /// Left end of the support, where `1 + c x` vanishes.
    pub fn lower_edge(&self) -> f64 {
        -1.0 / self.c
    }

    /// Log of the acceptance ratio; `None` outside `1 + c x > 0`.
    pub fn s(&self, x: f64) -> Option<f64> {
        let w = 1.0 + self.c * x;
        if w <= 0.0 {
            return None;
        }
        let v = w * w * w;
        Some(0.5 * x * x + self.d - self.d * v + 3.0 * self.d * w.ln())
    }

    /// Derivative of `exp(s(x))`, which simplifies to
    /// `-exp(s) c^2 x^3 / (3 (1 + c x))`.
    pub fn f_prime(&self, x: f64) -> Option<f64> {
        let s = self.s(x)?;
        let w = 1.0 + self.c * x;
        Some(-s.exp() * self.c * self.c * x * x * x / (3.0 * w))
    }

    /// Probability that one proposal is accepted.
    pub fn acceptance_probability(&self) -> f64 {
        let d = self.d;
        let ln_p = d + 0.5 * d.ln() + ln_gamma(self.alpha).expect("alpha >= 1")
            - 0.5 * (2.0 * PI).ln()
            - self.alpha * d.ln();
        ln_p.exp()
    }
}

/// One Marsaglia–Tsang proposal in binary64. Returns `None` on rejection.
pub fn gamma_sample_mt(alpha: f64, x: f64, u: f64) -> Option<f64> {
    let k = GammaEnvelopeConsts::new(alpha).ok()?;
    let w = 1.0 + k.c * x;
    let v = w * w * w;
    if v <= 0.0 {
        return None;
    }
    if u.ln() < 0.5 * x * x + k.d - k.d * v + k.d * v.ln() {
        Some(k.d * v)
    } else {
        None
    }
}

/// The same proposal evaluated in MPFR on grid inputs, with the envelope
/// constants computed once.
#[derive(Clone, Debug)]
pub struct GammaKernel {
    d: HighPrecisionReal,
    c: HighPrecisionReal,
    prec: u32,
}

impl GammaKernel {
    pub fn new(alpha: u64, prec: u32) -> Result<Self, SamplingError> {
        if alpha == 0 {
            return Err(SamplingError::InvalidParameter("gamma shape must be >= 1".into()));
        }
        let three = HighPrecisionReal::from_i64(3, prec);
        let alpha_3 = HighPrecisionReal::from_i64(3 * alpha as i64 - 1, prec);
        let d = alpha_3.div(&three);
        let nine_d = &d * 9.0;
        let c = HighPrecisionReal::from_i64(1, prec).div(&nine_d.sqrt());
        Ok(Self { d, c, prec })
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `1 + c x`, whose sign is the sign of `(1 + c x)^3`.
    fn base(&self, x: &HighPrecisionReal) -> HighPrecisionReal {
        &(&self.c * x) + 1.0
    }

    /// `s(x)`, or `None` when `1 + c x <= 0`.
    pub fn log_ratio(&self, x: &HighPrecisionReal) -> Option<HighPrecisionReal> {
        let w = self.base(x);
        if !w.is_positive() {
            return None;
        }
        let v = &w.square() * &w;
        let half_x2 = x.square().shr(1);
        let three_ln_w = &w.ln() * 3.0;
        let t = &(&(&half_x2 + &self.d) - &(&self.d * &v)) + &(&self.d * &three_ln_w);
        Some(t)
    }

    /// Accept indicator `u < exp(s(x))`, false when `1 + c x <= 0`.
    pub fn accepts(&self, x: &HighPrecisionReal, u: &HighPrecisionReal) -> bool {
        match self.log_ratio(x) {
            Some(s) => u.is_positive() && u.ln() < s,
            None => false,
        }
    }

    /// Proposal output `d (1 + c x)^3` on acceptance.
    pub fn sample(&self, x: &HighPrecisionReal, u: &HighPrecisionReal) -> Option<HighPrecisionReal> {
        if !self.accepts(x, u) {
            return None;
        }
        let w = self.base(x);
        Some(&self.d * &(&w.square() * &w))
    }

    /// The proposal restricted to the first `m1` fractional bits of its
    /// inputs, each rounded toward negative infinity.
    pub fn sample_grid(
        &self,
        m1: u32,
        x: FixedPointValue,
        u: FixedPointValue,
    ) -> Result<Option<HighPrecisionReal>, SamplingError> {
        let x = HighPrecisionReal::from_fixed(x.floor_to(m1)?, self.prec);
        let u = HighPrecisionReal::from_fixed(u.floor_to(m1)?, self.prec);
        Ok(self.sample(&x, &u))
    }
}

/// Whether the proposal takes the same branch on `(x, u)` as on the inputs
/// floored to the `2^-eps_bits` grid.
pub fn checker_c(eps_bits: u32, alpha: u64, x: f64, u: f64) -> Result<bool, SamplingError> {
    let prec = 2 * eps_bits + 192;
    let kernel = GammaKernel::new(alpha, prec)?;
    let xe = HighPrecisionReal::from_f64(x, prec);
    let ue = HighPrecisionReal::from_f64(u, prec);
    let xt = HighPrecisionReal::from_fixed(xe.floor_to_grid(eps_bits)?, prec);
    let ut = HighPrecisionReal::from_fixed(ue.floor_to_grid(eps_bits)?, prec);
    let pos = |v: &HighPrecisionReal| kernel.base(v).is_positive();
    if pos(&xe) != pos(&xt) {
        return Ok(false);
    }
    Ok(kernel.accepts(&xe, &ue) == kernel.accepts(&xt, &ut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn proposal_examples() {
        assert_relative_eq!(gamma_sample_mt(1.0, 0.0, 0.5).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert!(gamma_sample_mt(1.0, -(6f64.sqrt()), 0.3).is_none());
        assert!(gamma_sample_mt(1.0, -3.0, 0.3).is_none());
        assert!(gamma_sample_mt(0.5, 0.0, 0.5).is_none());
    }

    #[test]
    fn envelope_constants() {
        let k = GammaEnvelopeConsts::new(1.0).unwrap();
        assert_relative_eq!(k.c, 1.0 / 6f64.sqrt(), epsilon = 1e-15);
        assert!(GammaEnvelopeConsts::new(0.9).is_err());
        assert_eq!(k.f_prime(0.0), Some(-0.0));
        assert!(k.f_prime(-3.0).is_none());
        let back = GammaEnvelopeConsts::from_c(k.c);
        assert_relative_eq!(back.alpha, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn acceptance_probability_closed_form() {
        // alpha = 1: e^{2/3} sqrt(2/3) / (sqrt(2 pi) 2/3)
        let d: f64 = 2.0 / 3.0;
        let expect = d.exp() * d.sqrt() / ((2.0 * PI).sqrt() * d);
        let k = GammaEnvelopeConsts::new(1.0).unwrap();
        assert_relative_eq!(k.acceptance_probability(), expect, max_relative = 1e-12);
        for alpha in [1.0, 2.0, 5.0, 100.0, 1e4] {
            let p = GammaEnvelopeConsts::new(alpha).unwrap().acceptance_probability();
            assert!(p > 0.95 && p < 1.0, "alpha {alpha}: {p}");
        }
    }

    #[test]
    fn kernel_matches_binary64() {
        let kernel = GammaKernel::new(3, 128).unwrap();
        for (x, u) in [(0.3, 0.2), (-1.2, 0.7), (2.5, 0.01), (-3.0, 0.9)] {
            let hp = kernel.sample(
                &HighPrecisionReal::from_f64(x, 128),
                &HighPrecisionReal::from_f64(u, 128),
            );
            let fp = gamma_sample_mt(3.0, x, u);
            assert_eq!(hp.is_some(), fp.is_some(), "({x}, {u})");
            if let (Some(h), Some(f)) = (hp, fp) {
                assert_relative_eq!(h.to_f64(), f, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn checker_examples() {
        assert!(checker_c(4, 1, 0.25, 0.5).unwrap());
        assert!(checker_c(20, 1, 1.0, 0.5).unwrap());
        // x = -2.3 sits right of -sqrt 6 but floors to -2.5 on the half grid.
        let k = GammaEnvelopeConsts::new(1.0).unwrap();
        assert!(1.0 + k.c * -2.3 > 0.0);
        assert!(1.0 + k.c * -2.5 < 0.0);
        assert!(!checker_c(1, 1, -2.3, 0.9).unwrap());
    }
}
