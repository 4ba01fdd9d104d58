use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense amplitude vector over `num_qubits` qubits. Qubit 0 is the most
/// significant bit of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return Err(Error::Dimension {
                expected: amplitudes.len().next_power_of_two().max(1),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(num_qubits: u32, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: index,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn zero_state(num_qubits: u32) -> Self {
        Self::basis(num_qubits, 0).expect("index 0 always valid")
    }

    pub fn num_qubits(&self) -> u32 {
        self.amplitudes.len().trailing_zeros()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    /// `self ⊗ other`, with `self` on the high-order qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        StateVector { amplitudes: out }
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
