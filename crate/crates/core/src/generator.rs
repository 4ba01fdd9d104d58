//! Direct construction of the Beta-tree states and of the function-like
//! state isometry columns.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::PrecisionConfig;
use crate::error::{Error, Result};
use crate::numerics::{FixedPointValue, HighPrecisionReal};
use crate::oracle::{prfs_index, FunctionOracle, TreeSlot};
use crate::sampling::{sample_rounded_beta, BetaSamplerConfig, RandomTape};
use crate::state::StateVector;

/// Heap position of the split for `level`-bit `prefix`: `2^level + prefix - 1`.
fn node(level: u32, prefix: u64) -> usize {
    (1usize << level) + prefix as usize - 1
}

/// Branch probabilities `b_{t,z}` and leaf phases `u_z` of a Beta tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    n: u32,
    /// Heap-ordered: level `t`, prefix `z` lives at `2^t + z - 1`.
    betas: Vec<f64>,
    phases: Vec<f64>,
}

impl StateParams {
    pub fn new(n: u32, betas: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let dim = 1usize << n;
        if n == 0 || betas.len() != dim - 1 || phases.len() != dim {
            return Err(Error::IncompleteParams(format!(
                "n = {n} needs {} betas and {dim} phases, got {} and {}",
                dim.saturating_sub(1),
                betas.len(),
                phases.len()
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(Error::IncompleteParams(format!("beta {b} outside [0, 1]")));
        }
        if let Some(u) = phases.iter().find(|u| !(0.0..1.0).contains(*u)) {
            return Err(Error::IncompleteParams(format!("phase {u} outside [0, 1)")));
        }
        Ok(Self { n, betas, phases })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self, level: u32, prefix: u64) -> f64 {
        self.betas[node(level, prefix)]
    }

    pub fn phase(&self, leaf: u64) -> f64 {
        self.phases[leaf as usize]
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Squared amplitudes `c_z = prod_t Flip(b_{t, z[..t]}, z_t)`.
    pub fn leaf_weights(&self) -> Vec<f64> {
        let mut weights = vec![1.0];
        for level in 0..self.n {
            let mut next = Vec::with_capacity(weights.len() * 2);
            for (prefix, w) in weights.iter().enumerate() {
                let b = self.beta(level, prefix as u64);
                next.push(w * b);
                next.push(w * (1.0 - b));
            }
            weights = next;
        }
        weights
    }
}

/// Sampler output exactly as read off the oracle: grid Betas and phase words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledTree {
    pub n: u32,
    pub betas: Vec<FixedPointValue>,
    pub phases: Vec<FixedPointValue>,
}

impl SampledTree {
    pub fn beta(&self, level: u32, prefix: u64) -> FixedPointValue {
        self.betas[node(level, prefix)]
    }

    /// The raw Beta values as parameters.
    pub fn params(&self) -> Result<StateParams> {
        StateParams::new(
            self.n,
            self.betas.iter().map(FixedPointValue::to_f64).collect(),
            self.phases.iter().map(FixedPointValue::to_f64).collect(),
        )
    }

    /// Parameters after every Beta is replaced by `cos^2(2π θ)` for its
    /// truncated angle, which is what the circuit realizes.
    pub fn realized_params(&self, cfg: &PrecisionConfig) -> Result<StateParams> {
        let betas = self
            .betas
            .iter()
            .map(|b| theta_from_beta(*b, cfg).map(|(_, amp_sq)| amp_sq))
            .collect::<Result<Vec<_>>>()?;
        StateParams::new(self.n, betas, self.phases.iter().map(FixedPointValue::to_f64).collect())
    }
}

/// `θ = floor(arccos(√b) / 2π)` on the `2^-(n+λ')` grid and `cos^2(2π θ)`.
pub fn theta_from_beta(b: FixedPointValue, cfg: &PrecisionConfig) -> Result<(FixedPointValue, f64)> {
    if !b.in_unit_interval() {
        return Err(Error::IncompleteParams(format!("beta {b} outside [0, 1]")));
    }
    let bits = cfg.grid_bits();
    let prec = HighPrecisionReal::working_precision(bits.max(b.precision_bits())).max(128);
    let two_pi = HighPrecisionReal::pi(prec).shl(1);
    // Only b = 0, 1/2, 1 put the angle exactly on a grid point; everywhere
    // else it is irrational and the guard bits settle the floor.
    let quarter = FixedPointValue::new(1, 2)?;
    let theta = if b == FixedPointValue::zero(1) {
        quarter.floor_to(bits)?
    } else if b == FixedPointValue::half(1) {
        FixedPointValue::new(1, 3)?.floor_to(bits)?
    } else if b == FixedPointValue::one(1) {
        FixedPointValue::zero(bits)
    } else {
        let angle = HighPrecisionReal::from_fixed(b, prec).sqrt().acos();
        angle.div(&two_pi).floor_to_grid(bits)?
    };
    let turned = &HighPrecisionReal::from_fixed(theta, prec) * &two_pi;
    let amp_sq = turned.cos().square().to_f64();
    Ok((theta, amp_sq))
}

fn column_of(cfg: &PrecisionConfig, x: Option<u64>) -> Result<u64> {
    match (cfg.m, x) {
        (0, None) => Ok(0),
        (0, Some(_)) => Err(Error::Config(crate::error::ConfigError::Invalid(
            "an input was given to a generator with m = 0".into(),
        ))),
        (_, None) => Err(Error::Config(crate::error::ConfigError::Invalid(
            "an input is required when m > 0".into(),
        ))),
        (m, Some(x)) if x >> m != 0 => Err(Error::Config(crate::error::ConfigError::Invalid(format!(
            "input {x} does not fit {m} bits"
        )))),
        (_, Some(x)) => Ok(x),
    }
}

/// Reads the tree for input `x` (or the single tree when `m = 0`) off the oracle.
pub fn sample_tree(oracle: &FunctionOracle, x: Option<u64>) -> Result<SampledTree> {
    let cfg = oracle.config();
    let x = column_of(&cfg, x)?;
    let n = cfg.n;
    let mut betas = Vec::with_capacity(cfg.dim() - 1);
    for level in 0..n {
        let sampler = BetaSamplerConfig::new(cfg.grid_bits(), cfg.alpha(level))?;
        for prefix in 0..1u64 << level {
            let index = prfs_index(x, TreeSlot::Amplitude { level, prefix }, n)?;
            let mut tape = RandomTape::from_bytes(oracle.eval(index)?.to_vec());
            betas.push(sample_rounded_beta(&sampler, &mut tape)?);
        }
    }
    let mut phases = Vec::with_capacity(cfg.dim());
    let phase_bits = cfg.phase_bits();
    for leaf in 0..cfg.dim() as u64 {
        let index = prfs_index(x, TreeSlot::Phase { leaf }, n)?;
        let tape = RandomTape::from_bytes(oracle.eval(index)?.to_vec());
        let word = tape.bits_at(0, phase_bits as usize)?;
        let num = word.to_i128().ok_or(crate::error::NumericsError::Overflow)?;
        phases.push(FixedPointValue::new(num, phase_bits)?);
    }
    Ok(SampledTree { n, betas, phases })
}

/// Raw sampled parameters (before angle truncation) for input `x`.
pub fn build_params_from_oracle(oracle: &FunctionOracle, x: Option<u64>) -> Result<StateParams> {
    sample_tree(oracle, x)?.params()
}

/// `Σ_z e^{2πi u_z} √(c_z) |z⟩`.
pub fn build_state(params: &StateParams) -> Result<StateVector> {
    let amplitudes = params
        .leaf_weights()
        .into_iter()
        .zip(params.phases())
        .map(|(w, u)| Complex64::from_polar(w.max(0.0).sqrt(), 2.0 * PI * u))
        .collect();
    StateVector::new(amplitudes)
}

/// The pseudorandom state for `oracle` (which must have `m = 0`).
pub fn generate_prs(oracle: &FunctionOracle) -> Result<StateVector> {
    let cfg = oracle.config();
    build_state(&sample_tree(oracle, None)?.realized_params(&cfg)?)
}

/// `ψ_x` for input `x` of a function-like generator.
pub fn generate_prfs_column(oracle: &FunctionOracle, x: u64) -> Result<StateVector> {
    let cfg = oracle.config();
    if cfg.m == 0 {
        return Err(Error::Config(crate::error::ConfigError::Invalid(
            "function-like generation needs m >= 1".into(),
        )));
    }
    build_state(&sample_tree(oracle, Some(x))?.realized_params(&cfg)?)
}

/// Columns `|x⟩|ψ_x⟩` of the isometry, one per input `x`.
pub fn prfs_isometry(oracle: &FunctionOracle) -> Result<Vec<StateVector>> {
    let cfg = oracle.config();
    (0..1u64 << cfg.m)
        .map(|x| {
            let psi = generate_prfs_column(oracle, x)?;
            Ok(StateVector::basis(cfg.m, x as usize)?.tensor(&psi))
        })
        .collect()
}

/// Isometry columns built from explicit per-input parameters.
pub fn isometry_from_params(params: &[StateParams]) -> Result<Vec<StateVector>> {
    if !params.len().is_power_of_two() {
        return Err(Error::IncompleteParams(format!("{} columns is not a power of two", params.len())));
    }
    let m = params.len().trailing_zeros();
    params
        .iter()
        .enumerate()
        .map(|(x, p)| Ok(StateVector::basis(m, x)?.tensor(&build_state(p)?)))
        .collect()
}

fn offset<R: Rng + ?Sized>(rng: &mut R, delta: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let r: f64 = rng.sample(Open01);
    (2.0 * r - 1.0) * delta
}

/// Moves each Beta by less than `delta1` (clamped to `[0, 1]`) and each
/// phase by less than `delta2` around the unit circle.
pub fn perturb_params<R: Rng + ?Sized>(params: &StateParams, delta1: f64, delta2: f64, rng: &mut R) -> Result<StateParams> {
    if !(delta1 >= 0.0 && delta2 >= 0.0) {
        return Err(Error::IncompleteParams(format!(
            "perturbation sizes must be nonnegative, got {delta1} and {delta2}"
        )));
    }
    let betas = params
        .betas
        .iter()
        .map(|b| (b + offset(rng, delta1)).clamp(0.0, 1.0))
        .collect();
    let phases = params
        .phases
        .iter()
        .map(|u| {
            let w = (u + offset(rng, delta2)).rem_euclid(1.0);
            if w >= 1.0 {
                0.0
            } else {
                w
            }
        })
        .collect();
    StateParams::new(params.n, betas, phases)
}

/// Uniformly random parameters, for exercising the perturbation bounds.
pub fn random_params<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<StateParams> {
    let dim = 1usize << n;
    let betas = (0..dim - 1).map(|_| rng.random::<f64>()).collect();
    let phases = (0..dim).map(|_| rng.random::<f64>()).collect();
    StateParams::new(n, betas, phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn theta_examples() {
        let cfg = PrecisionConfig::prs(2, 8).unwrap();
        let bits = cfg.grid_bits();
        let (t, a) = theta_from_beta(FixedPointValue::one(bits), &cfg).unwrap();
        assert_eq!(t.numerator(), 0);
        assert_eq!(a, 1.0);
        let (t, a) = theta_from_beta(FixedPointValue::zero(bits), &cfg).unwrap();
        // a quarter turn is exactly representable, so it survives flooring
        assert_eq!(t.to_f64(), 0.25);
        assert!(a < 1e-30);
        let (t, a) = theta_from_beta(FixedPointValue::half(bits), &cfg).unwrap();
        assert_eq!(t.to_f64(), 0.125);
        assert!((a - 0.5).abs() <= 2.0 * PI * cfg.eps1());
    }

    #[test]
    fn theta_error_is_within_grid_bound() {
        let cfg = PrecisionConfig::prs(3, 5).unwrap();
        let bits = cfg.grid_bits();
        for k in 0..=(1i128 << bits) {
            let b = FixedPointValue::new(k, bits).unwrap();
            let (t, a) = theta_from_beta(b, &cfg).unwrap();
            assert!((0.0..=0.25).contains(&t.to_f64()));
            assert!((a - b.to_f64()).abs() <= 2.0 * PI * cfg.eps1());
        }
    }

    #[test]
    fn build_state_examples() {
        let s = build_state(&StateParams::new(1, vec![1.0], vec![0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes()[1].norm(), 0.0);

        let s = build_state(&StateParams::new(1, vec![0.5], vec![0.0, 0.5]).unwrap()).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(s.amplitudes()[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, -r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].im, 0.0, epsilon = 1e-15);

        let s = build_state(&StateParams::new(2, vec![0.5, 1.0, 0.0], vec![0.0; 4]).unwrap()).unwrap();
        let want = [r, 0.0, 0.0, r];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert_abs_diff_eq!(a.re, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn params_are_validated() {
        assert!(StateParams::new(2, vec![0.5; 2], vec![0.0; 4]).is_err());
        assert!(StateParams::new(1, vec![1.5], vec![0.0; 2]).is_err());
        assert!(StateParams::new(1, vec![0.5], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn generation_is_deterministic_and_normalized() {
        let cfg = PrecisionConfig::prs(3, 8).unwrap();
        let oracle = FunctionOracle::truly_random(cfg, b"determinism");
        let a = sample_tree(&oracle, None).unwrap();
        let b = sample_tree(&oracle, None).unwrap();
        assert_eq!(a, b);
        // the last level uses shape 1
        assert_eq!(cfg.alpha(cfg.n - 1), 1);
        let s = generate_prs(&oracle).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(sample_tree(&oracle, Some(0)).is_err());
    }

    #[test]
    fn prfs_columns_use_disjoint_indices() {
        let cfg = PrecisionConfig::new(2, 2, 4).unwrap();
        let oracle = FunctionOracle::truly_random(cfg, b"columns");
        let c0 = generate_prfs_column(&oracle, 0).unwrap();
        let c1 = generate_prfs_column(&oracle, 1).unwrap();
        assert_eq!(c0, generate_prfs_column(&oracle, 0).unwrap());
        assert_ne!(c0, c1);
        assert!(generate_prfs_column(&oracle, 4).is_err());
        let cols = prfs_isometry(&oracle).unwrap();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[1].dim(), 16);
    }

    #[test]
    fn perturbation_respects_radii() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let p = StateParams::new(2, vec![0.0, 1.0, 0.5], vec![0.0, 0.999, 0.5, 0.25]).unwrap();
        assert_eq!(perturb_params(&p, 0.0, 0.0, &mut rng).unwrap(), p);
        for _ in 0..200 {
            let q = perturb_params(&p, 0.1, 0.05, &mut rng).unwrap();
            for (a, b) in p.betas().iter().zip(q.betas()) {
                assert!((a - b).abs() < 0.1);
            }
            for (a, b) in p.phases().iter().zip(q.phases()) {
                let d = (a - b).rem_euclid(1.0);
                assert!(d.min(1.0 - d) < 0.05 + 1e-15);
            }
        }
        assert!(perturb_params(&p, -1.0, 0.0, &mut rng).is_err());
    }
}
