use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Mean of `|⟨ψ_i|ψ_j⟩|^{2t}` over distinct pairs, with the standard error of
/// that U-statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub t: u32,
    pub estimate: f64,
    pub std_error: f64,
}

/// Haar value of the order-`t` overlap moment, `t! (N−1)! / (N+t−1)!`.
pub fn haar_moment(n: u32, t: u32) -> f64 {
    let dim = (1u64 << n) as f64;
    (0..t).fold(1.0, |acc, k| acc * (k + 1) as f64 / (dim + k as f64))
}

/// Estimates for `t = 1..=max_t` from one pass over all pairs.
///
/// The variance uses the Hoeffding decomposition of a degree-2 U-statistic:
/// `Var ≈ (4(N−2) ζ₁ + 2 ζ₂) / (N(N−1))`, with `ζ₁` the variance of the
/// per-state mean kernel and `ζ₂` the variance of the kernel.
pub fn overlap_moments(ensemble: &[StateVector], max_t: u32) -> Result<Vec<MomentEstimate>> {
    let size = ensemble.len();
    if size < 2 {
        return Err(Error::Stats(format!("ensemble of {size} is too small for pairwise moments")));
    }
    let dim = ensemble[0].dim();
    if let Some(bad) = ensemble.iter().find(|s| s.dim() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            actual: bad.dim(),
        });
    }
    let tmax = max_t as usize;
    let mut row = vec![vec![0.0; size]; tmax];
    let mut sum = vec![0.0; tmax];
    let mut sum_sq = vec![0.0; tmax];
    for i in 0..size {
        for j in i + 1..size {
            let p = ensemble[i].inner(&ensemble[j])?.norm_sqr();
            let mut h = 1.0;
            for t in 0..tmax {
                h *= p;
                row[t][i] += h;
                row[t][j] += h;
                sum[t] += h;
                sum_sq[t] += h * h;
            }
        }
    }
    let nf = size as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    Ok((0..tmax)
        .map(|t| {
            let u = sum[t] / pairs;
            let zeta2 = (sum_sq[t] / pairs - u * u).max(0.0);
            let means: Vec<f64> = row[t].iter().map(|r| r / (nf - 1.0)).collect();
            let zeta1 = means.iter().map(|g| (g - u) * (g - u)).sum::<f64>() / (nf - 1.0);
            let var = (4.0 * (nf - 2.0) * zeta1 + 2.0 * zeta2) / (nf * (nf - 1.0));
            MomentEstimate {
                t: t as u32 + 1,
                estimate: u,
                std_error: var.max(0.0).sqrt(),
            }
        })
        .collect())
}

pub fn overlap_moment(ensemble: &[StateVector], t: u32) -> Result<MomentEstimate> {
    if t == 0 {
        return Err(Error::Stats("moment order must be at least 1".into()));
    }
    Ok(overlap_moments(ensemble, t)?[t as usize - 1])
}
