use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::state::StateVector;

/// Haar-random state on `n` qubits: a normalized vector of i.i.d. standard
/// complex Gaussians.
pub fn haar_sample<R: Rng + ?Sized>(n: u32, rng: &mut R) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let mut s = StateVector::new(amps).expect("power-of-two length");
    s.normalize();
    s
}
