use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::PrecisionConfig;
use crate::error::{ConfigError, Result};
use crate::generator::{build_state, generate_prs, sample_tree, StateParams};
use crate::oracle::{FunctionOracle, PrfKey};
use crate::state::StateVector;

use super::haar::haar_sample;

/// Where the states of an ensemble come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleSource {
    Haar,
    /// The generator with a fresh random function per state.
    Random,
    /// The generator with a fresh PRF key per state.
    Prf,
    /// The generator with every phase forced to zero.
    BrokenPhase,
}

impl EnsembleSource {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Haar => "haar",
            Self::Random => "random",
            Self::Prf => "prf",
            Self::BrokenPhase => "broken-phase",
        }
    }
}

impl fmt::Display for EnsembleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleSource {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "haar" => Ok(Self::Haar),
            "random" => Ok(Self::Random),
            "prf" => Ok(Self::Prf),
            "broken-phase" => Ok(Self::BrokenPhase),
            other => Err(ConfigError::Invalid(format!(
                "unknown ensemble source {other:?} (expected haar, random, prf or broken-phase)"
            ))),
        }
    }
}

/// One state from `source`; keys and seeds are drawn from `rng`.
pub fn sample_state<R: Rng + ?Sized>(source: EnsembleSource, cfg: PrecisionConfig, rng: &mut R) -> Result<StateVector> {
    match source {
        EnsembleSource::Haar => Ok(haar_sample(cfg.n, rng)),
        EnsembleSource::Random => generate_prs(&FunctionOracle::truly_random_from_rng(cfg, rng)),
        EnsembleSource::Prf => generate_prs(&FunctionOracle::keyed(PrfKey::generate(cfg, rng))),
        EnsembleSource::BrokenPhase => {
            let oracle = FunctionOracle::truly_random_from_rng(cfg, rng);
            let params = sample_tree(&oracle, None)?.realized_params(&cfg)?;
            let flat = StateParams::new(cfg.n, params.betas().to_vec(), vec![0.0; cfg.dim()])?;
            build_state(&flat)
        }
    }
}

/// 32-byte ensemble seed derived from arbitrary seed material.
pub fn battery_seed(material: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"haarforge/battery-seed/v1");
    h.update(material);
    h.finalize().into()
}

/// Randomness for state `index` of the ensemble tagged `stream` under `seed`.
///
/// Each state owns a ChaCha20 stream, so the ensemble does not depend on how
/// the work is split across threads.
pub fn state_rng(seed: &[u8; 32], stream: u32, index: u32) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::from_seed(*seed);
    rng.set_stream((u64::from(stream) << 32) | u64::from(index));
    rng
}

/// `size` states from `source`, generated in parallel.
pub fn generate_ensemble(
    source: EnsembleSource,
    cfg: PrecisionConfig,
    size: usize,
    seed: &[u8; 32],
    stream: u32,
) -> Result<Vec<StateVector>> {
    let size = u32::try_from(size).map_err(|_| ConfigError::Invalid(format!("ensemble of {size} states is too large")))?;
    (0..size)
        .into_par_iter()
        .map(|i| sample_state(source, cfg, &mut state_rng(seed, stream, i)))
        .collect()
}

/// `|⟨0…0|ψ⟩|²` for each state.
pub fn zero_marginals(ensemble: &[StateVector]) -> Vec<f64> {
    ensemble.iter().map(|s| s.amplitudes()[0].norm_sqr()).collect()
}

/// `Σ_z |⟨z|ψ⟩|⁴` for each state.
pub fn collision_probabilities(ensemble: &[StateVector]) -> Vec<f64> {
    ensemble
        .iter()
        .map(|s| s.amplitudes().iter().map(|a| a.norm_sqr() * a.norm_sqr()).sum())
        .collect()
}

/// `|⟨ψ_{2i}|ψ_{2i+1}⟩|²` over disjoint consecutive pairs.
pub fn disjoint_pair_overlaps(ensemble: &[StateVector]) -> Result<Vec<f64>> {
    ensemble
        .chunks_exact(2)
        .map(|p| Ok(p[0].inner(&p[1])?.norm_sqr()))
        .collect()
}
