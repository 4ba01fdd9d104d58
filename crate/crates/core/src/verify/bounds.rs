//! Closed-form perturbation and distinguishing bounds.

use std::f64::consts::PI;

/// State perturbation bound `√(2ⁿ n δ₁) + 2π δ₂`.
pub fn state_perturbation_bound(n: u32, delta1: f64, delta2: f64) -> f64 {
    ((1u64 << n) as f64 * n as f64 * delta1).sqrt() + 2.0 * PI * delta2
}

/// Isometry perturbation bound `2^m (√(2ⁿ n δ₁) + 2π δ₂)` on half the
/// diamond (or Choi trace) distance.
pub fn isometry_perturbation_bound(n: u32, m: u32, delta1: f64, delta2: f64) -> f64 {
    (1u64 << m) as f64 * state_perturbation_bound(n, delta1, delta2)
}

/// Distinguishing bound `(1 + √(2π)) l √n 2^{−λ/2} + 2π l 2^{−λ} + 2^{−λ}`
/// for an adversary making `l` queries.
pub fn distinguishing_bound(n: u32, lambda: u32, queries: u32) -> f64 {
    let l = queries as f64;
    let lam = lambda as f64;
    (1.0 + (2.0 * PI).sqrt()) * l * (n as f64).sqrt() * (-lam / 2.0).exp2() + 2.0 * PI * l * (-lam).exp2() + (-lam).exp2()
}
