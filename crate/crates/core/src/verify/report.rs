use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::PrecisionConfig;
use crate::error::{ConfigError, Error, Result};
use crate::numerics::regularized_incomplete_beta;

use super::ensemble::{disjoint_pair_overlaps, generate_ensemble, zero_marginals, EnsembleSource};
use super::moments::{haar_moment, overlap_moments, MomentEstimate};
use super::stats::ks_test;

/// Version stamped on every JSON report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Significance level of the KS verdicts.
pub const KS_LEVEL: f64 = 0.01;

/// Width, in standard errors, of the moment verdicts.
pub const MOMENT_SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsRecord {
    pub name: String,
    pub samples: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Moment and marginal-law checks of one ensemble against Haar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub schema_version: u32,
    pub source: EnsembleSource,
    pub n: u32,
    pub lambda: u32,
    pub ensemble_size: usize,
    pub marginal_size: usize,
    pub moments: Vec<MomentEstimate>,
    /// The same estimates on a Haar ensemble of equal size.
    pub haar_moments: Vec<MomentEstimate>,
    pub ks: Vec<KsRecord>,
    pub verdicts: Vec<Verdict>,
}

impl EnsembleReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// `(name, passed)` pairs, for comparing runs on different backends.
    pub fn verdict_signature(&self) -> Vec<(String, bool)> {
        self.verdicts.iter().map(|v| (v.name.clone(), v.passed)).collect()
    }
}

/// Raw per-state statistics behind an [`EnsembleReport`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawEnsembleData {
    pub marginals: Vec<f64>,
    pub overlaps: Vec<f64>,
}

impl RawEnsembleData {
    /// Writes `kind,index,value` rows, marginals first.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "kind,index,value")?;
        for (i, v) in self.marginals.iter().enumerate() {
            writeln!(out, "marginal,{i},{v:.17e}")?;
        }
        for (i, v) in self.overlaps.iter().enumerate() {
            writeln!(out, "overlap,{i},{v:.17e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HaarBatteryConfig {
    /// States used for the overlap moments.
    pub ensemble_size: usize,
    /// States used for the marginal-law KS test.
    pub marginal_size: usize,
}

impl Default for HaarBatteryConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 2000,
            marginal_size: 10_000,
        }
    }
}

fn within(estimate: &MomentEstimate, reference: f64) -> (bool, String) {
    let gap = (estimate.estimate - reference).abs();
    let tol = MOMENT_SIGMAS * estimate.std_error;
    (
        gap <= tol,
        format!(
            "estimate {:.6e} vs {reference:.6e}: |gap| {gap:.3e}, allowed {tol:.3e}",
            estimate.estimate
        ),
    )
}

/// Compares `source` with Haar on the `t = 1, 2` overlap moments and the law
/// of `|⟨0…0|ψ⟩|²`, which for Haar states is `Beta(1, 2ⁿ − 1)`.
pub fn haar_battery(
    cfg: PrecisionConfig,
    source: EnsembleSource,
    battery: HaarBatteryConfig,
    seed: &[u8; 32],
) -> Result<(EnsembleReport, RawEnsembleData)> {
    if battery.ensemble_size < 2 {
        return Err(ConfigError::Invalid("moment battery needs at least 2 states".into()).into());
    }
    let ensemble = generate_ensemble(source, cfg, battery.ensemble_size, seed, 1)?;
    let haar = generate_ensemble(EnsembleSource::Haar, cfg, battery.ensemble_size, seed, 2)?;
    let moments = overlap_moments(&ensemble, 2)?;
    let haar_moments = overlap_moments(&haar, 2)?;

    let mut verdicts = Vec::new();
    for (m, h) in moments.iter().zip(&haar_moments) {
        let reference = haar_moment(cfg.n, m.t);
        let (ok, detail) = within(m, reference);
        verdicts.push(Verdict::new(format!("moment-t{}-generated", m.t), ok, detail));
        let (ok, detail) = within(h, reference);
        verdicts.push(Verdict::new(format!("moment-t{}-haar", m.t), ok, detail));
        let gap = (m.estimate - h.estimate).abs();
        let tol = MOMENT_SIGMAS * m.std_error.hypot(h.std_error);
        verdicts.push(Verdict::new(
            format!("moment-t{}-agreement", m.t),
            gap <= tol,
            format!("|gap| {gap:.3e}, allowed {tol:.3e}"),
        ));
    }

    let marginal_states = if battery.marginal_size > 0 {
        generate_ensemble(source, cfg, battery.marginal_size, seed, 3)?
    } else {
        Vec::new()
    };
    let marginals = zero_marginals(&marginal_states);
    let mut ks = Vec::new();
    if !marginals.is_empty() {
        let mut sorted = marginals.clone();
        sorted.sort_by(f64::total_cmp);
        let b = (cfg.dim() - 1) as f64;
        let cdf_err = std::cell::Cell::new(None);
        let (statistic, p_value) = ks_test(&sorted, |x| {
            regularized_incomplete_beta(1.0, b, x).unwrap_or_else(|e| {
                cdf_err.set(Some(e));
                f64::NAN
            })
        })?;
        if let Some(e) = cdf_err.take() {
            return Err(Error::Numerics(e));
        }
        verdicts.push(Verdict::new(
            "marginal-ks",
            p_value >= KS_LEVEL,
            format!("D = {statistic:.5}, p = {p_value:.4} over {} states", sorted.len()),
        ));
        ks.push(KsRecord {
            name: "marginal-zero".into(),
            samples: sorted.len(),
            statistic,
            p_value,
        });
    }

    let report = EnsembleReport {
        schema_version: REPORT_SCHEMA_VERSION,
        source,
        n: cfg.n,
        lambda: cfg.lambda,
        ensemble_size: battery.ensemble_size,
        marginal_size: battery.marginal_size,
        moments,
        haar_moments,
        ks,
        verdicts,
    };
    let raw = RawEnsembleData {
        marginals,
        overlaps: disjoint_pair_overlaps(&ensemble)?,
    };
    Ok((report, raw))
}
