use serde::{Deserialize, Serialize};

use crate::config::PrecisionConfig;
use crate::error::{ConfigError, Result};

use super::bounds::distinguishing_bound;
use super::ensemble::{collision_probabilities, disjoint_pair_overlaps, generate_ensemble, zero_marginals, EnsembleSource};
use super::report::REPORT_SCHEMA_VERSION;
use super::stats::{ks_two_sample, KS_MIN_SAMPLES};

/// Family-wise error rate of the per-test confidence bands.
pub const FAMILY_ALPHA: f64 = 1e-3;

const NOTE: &str = "advantage is the largest two-sample KS distance over a fixed battery of \
statistics; a finite battery only lower-bounds what an unrestricted adversary could achieve, \
so staying under the bound is evidence of consistency, not a proof of indistinguishability";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherTest {
    pub name: String,
    pub samples_a: usize,
    pub samples_b: usize,
    /// Two-sample KS distance, used as the advantage of this test.
    pub statistic: f64,
    pub p_value: f64,
    pub ci_half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub schema_version: u32,
    pub n: u32,
    pub lambda: u32,
    pub queries: u32,
    pub trials: usize,
    pub source_a: EnsembleSource,
    pub source_b: EnsembleSource,
    pub tests: Vec<DistinguisherTest>,
    /// Largest statistic over the battery.
    pub advantage: f64,
    /// Half-width of the band around the test that attains `advantage`.
    pub ci_half_width: f64,
    /// Largest `statistic − ci_half_width`, floored at zero.
    pub advantage_lower: f64,
    pub bound: f64,
    /// Every test sits inside its band around zero.
    pub consistent_with_zero: bool,
    /// `advantage_lower ≤ bound`.
    pub within_bound: bool,
    pub note: String,
}

/// Half-width of a simultaneous DKW-style band for a two-sample KS distance
/// when `tests` distances are reported together.
pub fn ks_ci_half_width(na: usize, nb: usize, tests: usize) -> f64 {
    let alpha = FAMILY_ALPHA / tests.max(1) as f64;
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    let (na, nb) = (na as f64, nb as f64);
    c * ((na + nb) / (na * nb)).sqrt()
}

/// Compares `trials` states from each source on the marginal of `|0…0⟩`, the
/// collision probability and the overlap of disjoint pairs.
///
/// The two sides use different streams of `seed`, so the same source on both
/// sides gives independent ensembles.
pub fn distinguisher_experiment(
    cfg: PrecisionConfig,
    source_a: EnsembleSource,
    source_b: EnsembleSource,
    queries: u32,
    trials: usize,
    seed: &[u8; 32],
) -> Result<AdvantageReport> {
    if trials < 2 * KS_MIN_SAMPLES {
        return Err(ConfigError::Invalid(format!("need at least {} trials, got {trials}", 2 * KS_MIN_SAMPLES)).into());
    }
    if queries == 0 {
        return Err(ConfigError::Invalid("number of queries must be at least 1".into()).into());
    }
    let a = generate_ensemble(source_a, cfg, trials, seed, 1)?;
    let b = generate_ensemble(source_b, cfg, trials, seed, 2)?;

    let mut raw = [
        ("zero-marginal", zero_marginals(&a), zero_marginals(&b)),
        ("collision", collision_probabilities(&a), collision_probabilities(&b)),
        ("pair-overlap", disjoint_pair_overlaps(&a)?, disjoint_pair_overlaps(&b)?),
    ];
    let count = raw.len();
    let mut tests = Vec::with_capacity(count);
    for (name, xa, xb) in raw.iter_mut() {
        let (statistic, p_value) = ks_two_sample(xa, xb)?;
        tests.push(DistinguisherTest {
            name: (*name).to_string(),
            samples_a: xa.len(),
            samples_b: xb.len(),
            statistic,
            p_value,
            ci_half_width: ks_ci_half_width(xa.len(), xb.len(), count),
        });
    }

    let top = tests
        .iter()
        .max_by(|x, y| x.statistic.total_cmp(&y.statistic))
        .expect("battery is not empty");
    let advantage = top.statistic;
    let ci_half_width = top.ci_half_width;
    let advantage_lower = tests
        .iter()
        .map(|t| t.statistic - t.ci_half_width)
        .fold(0.0, f64::max);
    let bound = distinguishing_bound(cfg.n, cfg.lambda, queries);
    Ok(AdvantageReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n: cfg.n,
        lambda: cfg.lambda,
        queries,
        trials,
        source_a,
        source_b,
        consistent_with_zero: tests.iter().all(|t| t.statistic <= t.ci_half_width),
        within_bound: advantage_lower <= bound,
        tests,
        advantage,
        ci_half_width,
        advantage_lower,
        bound,
        note: NOTE.to_string(),
    })
}
