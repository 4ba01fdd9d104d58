//! The classical function behind the state generators, and the index
//! conventions that carve its domain into amplitude and phase slots.

use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::config::PrecisionConfig;
use crate::error::OracleError;

const SEED_DOMAIN: &[u8] = b"haarforge/random-oracle/v1";
const KEY_DOMAIN: &[u8] = b"haarforge/prf-key/v1";

/// A secret key for the GGM backend together with the sizes it was made for.
#[derive(Clone, PartialEq, Eq)]
pub struct PrfKey {
    root: [u8; 32],
    cfg: PrecisionConfig,
}

impl fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrfKey").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

impl PrfKey {
    /// Bytes of seed material needed for security parameter `lambda`.
    pub fn material_bytes(lambda: u32) -> usize {
        (lambda as usize).div_ceil(8)
    }

    /// Derives the GGM root from at least `ceil(λ/8)` bytes of seed material.
    pub fn from_material(cfg: PrecisionConfig, material: &[u8]) -> Result<Self, OracleError> {
        let need = Self::material_bytes(cfg.lambda);
        if material.len() < need {
            return Err(OracleError::Key(format!(
                "need at least {need} bytes of key material for lambda = {}, got {}",
                cfg.lambda,
                material.len()
            )));
        }
        let mut h = Sha256::new();
        h.update(KEY_DOMAIN);
        h.update(cfg.n.to_be_bytes());
        h.update(cfg.m.to_be_bytes());
        h.update(cfg.lambda.to_be_bytes());
        h.update(material);
        Ok(Self {
            root: h.finalize().into(),
            cfg,
        })
    }

    pub fn from_hex(cfg: PrecisionConfig, key_hex: &str) -> Result<Self, OracleError> {
        let bytes = hex::decode(key_hex.trim()).map_err(|e| OracleError::Key(format!("key hex: {e}")))?;
        Self::from_material(cfg, &bytes)
    }

    /// Fresh key from `λ` bits of the supplied randomness.
    pub fn generate<R: RngCore + ?Sized>(cfg: PrecisionConfig, rng: &mut R) -> Self {
        let mut material = vec![0u8; Self::material_bytes(cfg.lambda)];
        rng.fill_bytes(&mut material);
        if !cfg.lambda.is_multiple_of(8) {
            let last = material.len() - 1;
            material[last] &= 0xffu8 << (8 - cfg.lambda % 8);
        }
        Self::from_material(cfg, &material).expect("material sized for lambda")
    }

    pub fn config(&self) -> PrecisionConfig {
        self.cfg
    }
}

/// Length-doubling generator: one ChaCha20 stream keyed by the node label.
fn ggm_expand(seed: &[u8; 32]) -> ([u8; 32], [u8; 32]) {
    let mut rng = ChaCha20Rng::from_seed(*seed);
    let mut out = [0u8; 64];
    rng.fill_bytes(&mut out);
    let mut left = [0u8; 32];
    let mut right = [0u8; 32];
    left.copy_from_slice(&out[..32]);
    right.copy_from_slice(&out[32..]);
    (left, right)
}

#[derive(Debug)]
enum Backend {
    TrulyRandom {
        seed: [u8; 32],
        memo: DashMap<u64, Arc<[u8]>>,
    },
    KeyedPrf(PrfKey),
}

/// `f : {0,1}^(n+m+1) -> {0,1}^L`.
#[derive(Debug)]
pub struct FunctionOracle {
    cfg: PrecisionConfig,
    output_bytes: usize,
    backend: Backend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    TrulyRandom,
    KeyedPrf,
}

impl FunctionOracle {
    /// A lazily sampled random function; each index gets an independent
    /// ChaCha20 stream under a key derived from `master_seed`.
    pub fn truly_random(cfg: PrecisionConfig, master_seed: &[u8]) -> Self {
        let mut h = Sha256::new();
        h.update(SEED_DOMAIN);
        h.update(master_seed);
        Self {
            cfg,
            output_bytes: cfg.oracle_output_bits() / 8,
            backend: Backend::TrulyRandom {
                seed: h.finalize().into(),
                memo: DashMap::new(),
            },
        }
    }

    pub fn truly_random_from_rng<R: RngCore + ?Sized>(cfg: PrecisionConfig, rng: &mut R) -> Self {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        Self::truly_random(cfg, &seed)
    }

    pub fn keyed(key: PrfKey) -> Self {
        let cfg = key.cfg;
        Self {
            cfg,
            output_bytes: cfg.oracle_output_bits() / 8,
            backend: Backend::KeyedPrf(key),
        }
    }

    pub fn config(&self) -> PrecisionConfig {
        self.cfg
    }

    pub fn kind(&self) -> BackendKind {
        match self.backend {
            Backend::TrulyRandom { .. } => BackendKind::TrulyRandom,
            Backend::KeyedPrf(_) => BackendKind::KeyedPrf,
        }
    }

    pub fn input_bits(&self) -> u32 {
        self.cfg.input_bits()
    }

    pub fn output_bits(&self) -> usize {
        self.output_bytes * 8
    }

    pub fn eval(&self, index: u64) -> Result<Arc<[u8]>, OracleError> {
        let bits = self.input_bits();
        if bits < 64 && index >> bits != 0 {
            return Err(OracleError::IndexOutOfRange { index, bits });
        }
        match &self.backend {
            Backend::TrulyRandom { seed, memo } => Ok(memo
                .entry(index)
                .or_insert_with(|| {
                    let mut rng = ChaCha20Rng::from_seed(*seed);
                    rng.set_stream(index);
                    let mut out = vec![0u8; self.output_bytes];
                    rng.fill_bytes(&mut out);
                    out.into()
                })
                .clone()),
            Backend::KeyedPrf(key) => {
                let mut node = key.root;
                for i in (0..bits).rev() {
                    let (left, right) = ggm_expand(&node);
                    node = if (index >> i) & 1 == 1 { right } else { left };
                }
                let mut rng = ChaCha20Rng::from_seed(node);
                rng.set_stream(1);
                let mut out = vec![0u8; self.output_bytes];
                rng.fill_bytes(&mut out);
                Ok(out.into())
            }
        }
    }
}

/// Which part of the state tree an oracle query serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeSlot {
    /// Beta split at `level` for the `level`-bit `prefix`.
    Amplitude { level: u32, prefix: u64 },
    /// Phase of leaf `leaf`.
    Phase { leaf: u64 },
}

/// `2^t + z`.
pub fn amp_index(level: u32, prefix: u64) -> Result<u64, OracleError> {
    if level >= 63 || prefix >> level != 0 {
        return Err(OracleError::Component(format!("prefix {prefix} does not fit {level} bits")));
    }
    Ok((1u64 << level) + prefix)
}

/// `2^n + z`.
pub fn phase_index(leaf: u64, n: u32) -> Result<u64, OracleError> {
    if n >= 63 || leaf >> n != 0 {
        return Err(OracleError::Component(format!("leaf {leaf} does not fit {n} bits")));
    }
    Ok((1u64 << n) + leaf)
}

/// `x · 2^(n+1)` plus the amplitude or phase offset.
pub fn prfs_index(x: u64, slot: TreeSlot, n: u32) -> Result<u64, OracleError> {
    let offset = match slot {
        TreeSlot::Amplitude { level, prefix } => {
            if level >= n {
                return Err(OracleError::Component(format!("level {level} must be below n = {n}")));
            }
            amp_index(level, prefix)?
        }
        TreeSlot::Phase { leaf } => phase_index(leaf, n)?,
    };
    x.checked_mul(1u64 << (n + 1))
        .and_then(|base| base.checked_add(offset))
        .ok_or_else(|| OracleError::Component(format!("input {x} overflows the index space")))
}
