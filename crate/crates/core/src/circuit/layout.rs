use crate::config::PrecisionConfig;
use crate::error::{Error, Result};

/// Largest ancilla width (and so `λ'`) simulated on the circuit path.
pub const MAX_CIRCUIT_LAMBDA_PRIME: u32 = 24;
/// Largest total register simulated on the circuit path.
pub const MAX_CIRCUIT_WIRES: u32 = 22;

/// Wires `[input (m) | data (n) | ancilla (n + λ')]`, wire 0 being the most
/// significant bit of a basis index. The phase step reuses the first `λ'`
/// ancilla wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub m: u32,
    pub n: u32,
    pub ancilla: u32,
    pub phase_bits: u32,
}

impl RegisterLayout {
    pub fn for_config(cfg: &PrecisionConfig) -> Result<Self> {
        let layout = Self {
            m: cfg.m,
            n: cfg.n,
            ancilla: cfg.grid_bits(),
            phase_bits: cfg.phase_bits(),
        };
        if cfg.lambda_prime() > MAX_CIRCUIT_LAMBDA_PRIME {
            return Err(Error::Wire(format!(
                "circuit path supports lambda' up to {MAX_CIRCUIT_LAMBDA_PRIME}, got {}",
                cfg.lambda_prime()
            )));
        }
        if layout.wires() > MAX_CIRCUIT_WIRES {
            return Err(Error::Wire(format!(
                "circuit path supports up to {MAX_CIRCUIT_WIRES} wires, layout needs {}",
                layout.wires()
            )));
        }
        Ok(layout)
    }

    pub fn wires(&self) -> u32 {
        self.m + self.n + self.ancilla
    }

    pub fn dim(&self) -> usize {
        1usize << self.wires()
    }

    pub fn input_wire(&self, j: u32) -> usize {
        j as usize
    }

    pub fn data_wire(&self, j: u32) -> usize {
        (self.m + j) as usize
    }

    pub fn ancilla_wire(&self, k: u32) -> usize {
        (self.m + self.n + k) as usize
    }

    pub fn ancilla_wires(&self) -> Vec<usize> {
        (0..self.ancilla).map(|k| self.ancilla_wire(k)).collect()
    }

    /// Bit position of `wire` inside a basis index.
    pub fn bit(&self, wire: usize) -> u32 {
        self.wires() - 1 - wire as u32
    }

    pub fn ancilla_mask(&self) -> usize {
        (1usize << self.ancilla) - 1
    }

    pub fn input_of(&self, index: usize) -> u64 {
        (index >> (self.n + self.ancilla)) as u64
    }

    pub fn data_of(&self, index: usize) -> u64 {
        ((index >> self.ancilla) & ((1usize << self.n) - 1)) as u64
    }

    pub fn ancilla_of(&self, index: usize) -> u64 {
        (index & self.ancilla_mask()) as u64
    }

    /// Basis index with ancilla zero for input `x` and data `z`.
    pub fn index(&self, x: u64, z: u64, anc: u64) -> usize {
        ((x as usize) << (self.n + self.ancilla)) | ((z as usize) << self.ancilla) | anc as usize
    }
}
