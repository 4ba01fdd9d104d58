use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::sampling::{randomness_budget_beta, MAX_GRID_BITS};

/// Largest supported output register on the direct path.
pub const MAX_QUBITS: u32 = 24;

/// Size and precision parameters shared by the generator, oracle and circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionConfig {
    /// Output qubits.
    pub n: u32,
    /// Input qubits; 0 for a plain state generator.
    pub m: u32,
    pub lambda: u32,
}

impl PrecisionConfig {
    pub fn new(n: u32, m: u32, lambda: u32) -> Result<Self, ConfigError> {
        let cfg = Self { n, m, lambda };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn prs(n: u32, lambda: u32) -> Result<Self, ConfigError> {
        Self::new(n, 0, lambda)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::Invalid("n must be at least 1".into()));
        }
        if self.n > MAX_QUBITS {
            return Err(ConfigError::Invalid(format!("n must be at most {MAX_QUBITS}, got {}", self.n)));
        }
        if self.lambda == 0 {
            return Err(ConfigError::Invalid("lambda must be at least 1".into()));
        }
        let grid = self.n as u64 + self.lambda as u64 + 2 * self.m as u64;
        if grid > MAX_GRID_BITS as u64 {
            return Err(ConfigError::Invalid(format!(
                "n + lambda + 2m must be at most {MAX_GRID_BITS}, got {grid}"
            )));
        }
        Ok(())
    }

    /// `λ' = λ + 2m`.
    pub fn lambda_prime(&self) -> u32 {
        self.lambda + 2 * self.m
    }

    /// Bits of the amplitude grid `eps1 = 2^-(n + λ')`; also the Beta sampler grid.
    pub fn grid_bits(&self) -> u32 {
        self.n + self.lambda_prime()
    }

    /// Bits of the phase grid `eps2 = 2^-λ'`.
    pub fn phase_bits(&self) -> u32 {
        self.lambda_prime()
    }

    pub fn eps1(&self) -> f64 {
        (-(self.grid_bits() as f64)).exp2()
    }

    pub fn eps2(&self) -> f64 {
        (-(self.phase_bits() as f64)).exp2()
    }

    /// Beta shape `2^(n - t - 1)` used at tree level `t`.
    pub fn alpha(&self, level: u32) -> u64 {
        1u64 << (self.n - level - 1)
    }

    /// Oracle input width `n + m + 1`.
    pub fn input_bits(&self) -> u32 {
        self.n + self.m + 1
    }

    /// Oracle output length in bits: one rounded Beta tape, padded to whole bytes.
    pub fn oracle_output_bits(&self) -> usize {
        let bits = randomness_budget_beta(self.grid_bits(), 1).expect("grid bits validated");
        bits.div_ceil(8) * 8
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_parameters() {
        let cfg = PrecisionConfig::new(2, 2, 4).unwrap();
        assert_eq!(cfg.lambda_prime(), 8);
        assert_eq!(cfg.grid_bits(), 10);
        assert_eq!(cfg.eps1(), 2f64.powi(-10));
        assert_eq!(cfg.eps2(), 2f64.powi(-8));
        assert_eq!(cfg.alpha(0), 2);
        assert_eq!(cfg.alpha(1), 1);
        assert_eq!(cfg.input_bits(), 5);
        assert_eq!(cfg.oracle_output_bits() % 8, 0);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(PrecisionConfig::prs(0, 8).is_err());
        assert!(PrecisionConfig::prs(3, 0).is_err());
        assert!(PrecisionConfig::prs(25, 8).is_err());
        assert!(PrecisionConfig::new(4, 8, 20).is_err());
        assert!(PrecisionConfig::prs(4, 32).is_ok());
    }
}
