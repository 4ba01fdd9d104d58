//! Named verification batteries shared by the command line and the test suites.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{simulate, MAX_CIRCUIT_WIRES, CircuitOptions, OracleTables, Stages, ANCILLA_TOLERANCE};
use crate::config::PrecisionConfig;
use crate::error::{ConfigError, Result};
use crate::generator::{generate_prs, isometry_from_params, perturb_params, prfs_isometry, random_params};
use crate::oracle::FunctionOracle;
use crate::sampling::{randomness_budget_beta, rounded_beta_masses, sample_rounded_beta, BetaSamplerConfig, RandomTape};
use crate::state::StateVector;

use super::bounds::{isometry_perturbation_bound, state_perturbation_bound};
use super::choi::{choi_of_isometry, choi_trace_distance};
use super::distance::trace_distance_pure;
use super::ensemble::state_rng;
use super::report::{haar_battery, EnsembleReport, HaarBatteryConfig, RawEnsembleData, Verdict, REPORT_SCHEMA_VERSION};
use super::stats::tv_distance_discrete;
use super::EnsembleSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Battery {
    SamplerDistance,
    LemmaBounds,
    HaarMoments,
    Isometry,
    PathEquivalence,
}

impl Battery {
    pub const ALL: [Battery; 5] = [
        Battery::SamplerDistance,
        Battery::LemmaBounds,
        Battery::HaarMoments,
        Battery::Isometry,
        Battery::PathEquivalence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::SamplerDistance => "sampler-distance",
            Self::LemmaBounds => "lemma-bounds",
            Self::HaarMoments => "haar-moments",
            Self::Isometry => "isometry",
            Self::PathEquivalence => "path-equivalence",
        }
    }
}

impl fmt::Display for Battery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Battery {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|b| b.name()).collect();
            ConfigError::Invalid(format!("unknown battery {s:?} (expected one of {})", names.join(", ")))
        })
    }
}

/// Outcome of one battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub schema_version: u32,
    pub battery: Battery,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ensemble: Option<EnsembleReport>,
}

impl BatteryReport {
    fn new(battery: Battery, verdicts: Vec<Verdict>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            battery,
            verdicts,
            ensemble: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }
}

/// Settings for [`run_battery`]; unused fields are ignored by each battery.
#[derive(Clone, Debug)]
pub struct BatterySettings {
    pub cfg: PrecisionConfig,
    pub source: EnsembleSource,
    pub seed: [u8; 32],
    pub haar: HaarBatteryConfig,
    /// Randomized trials of the state perturbation bound.
    pub trials: usize,
    /// Randomized trials of the isometry perturbation bound.
    pub isometry_trials: usize,
    /// Draws per configuration of the sampler-distance battery.
    pub sampler_draws: usize,
    /// Seeds per `(n, λ)` of the path-equivalence battery.
    pub path_seeds: usize,
}

impl BatterySettings {
    pub fn new(cfg: PrecisionConfig, source: EnsembleSource, seed: [u8; 32]) -> Self {
        Self {
            cfg,
            source,
            seed,
            haar: HaarBatteryConfig::default(),
            trials: 1000,
            isometry_trials: 200,
            sampler_draws: 1_000_000,
            path_seeds: 100,
        }
    }
}

pub fn run_battery(battery: Battery, s: &BatterySettings) -> Result<(BatteryReport, Option<RawEnsembleData>)> {
    Ok(match battery {
        Battery::SamplerDistance => (sampler_distance(&SAMPLER_CASES, s.sampler_draws, &s.seed)?, None),
        Battery::LemmaBounds => (lemma_bounds(s.trials, s.isometry_trials, &s.seed)?, None),
        Battery::HaarMoments => {
            let (ensemble, raw) = haar_battery(s.cfg, s.source, s.haar, &s.seed)?;
            let mut report = BatteryReport::new(battery, ensemble.verdicts.clone());
            report.ensemble = Some(ensemble);
            (report, Some(raw))
        }
        Battery::Isometry => (isometry(s.cfg.lambda, &s.seed)?, None),
        Battery::PathEquivalence => (path_equivalence(4, 8, s.path_seeds, &s.seed)?, None),
    })
}

/// `(m, α)` pairs checked by the sampler-distance battery.
pub const SAMPLER_CASES: [(u32, u64); 3] = [(4, 1), (8, 2), (8, 4)];

/// Largest total-variation distance tolerated between the sampled and the
/// exact rounded-Beta law.
pub const SAMPLER_TV_TOLERANCE: f64 = 0.01;

/// Histogram of `draws` rounded Beta(α, α) draws on the `2^-m` grid, each
/// from its own tape.
pub fn rounded_beta_histogram(m: u32, alpha: u64, draws: usize, seed: &[u8; 32]) -> Result<Vec<u64>> {
    let cfg = BetaSamplerConfig::new(m, alpha)?;
    let bits = randomness_budget_beta(m, alpha)?;
    let stream = (m << 16) | alpha as u32;
    let cells = (1usize << m) + 1;
    let draws = u32::try_from(draws).map_err(|_| ConfigError::Invalid(format!("{draws} draws is too many")))?;
    (0..draws)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut tape = RandomTape::from_rng(&mut state_rng(seed, stream, i), bits);
            let v = sample_rounded_beta(&cfg, &mut tape)?;
            Ok((v.to_f64() * (1u64 << m) as f64).round() as usize)
        })
        .try_fold(
            || vec![0u64; cells],
            |mut h, k| {
                h[k?] += 1;
                Ok(h)
            },
        )
        .try_reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

pub fn sampler_distance(cases: &[(u32, u64)], draws: usize, seed: &[u8; 32]) -> Result<BatteryReport> {
    let mut verdicts = Vec::new();
    for &(m, alpha) in cases {
        let hist = rounded_beta_histogram(m, alpha, draws, seed)?;
        let tv = tv_distance_discrete(&hist, &rounded_beta_masses(m, alpha as f64)?)?;
        verdicts.push(Verdict::new(
            format!("rounded-beta-m{m}-a{alpha}"),
            tv <= SAMPLER_TV_TOLERANCE,
            format!("TV {tv:.5} over {draws} draws, allowed {SAMPLER_TV_TOLERANCE}"),
        ));
    }
    Ok(BatteryReport::new(Battery::SamplerDistance, verdicts))
}

/// Outcome of repeated randomized checks of one inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTrials {
    pub trials: usize,
    pub held: usize,
    /// Largest observed `distance / bound`.
    pub worst_ratio: f64,
}

fn pick_delta<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (-(rng.random_range(4..=12) as f64)).exp2()
}

/// Trace distance between states built from random parameters and from a
/// perturbation of them, against `√(2ⁿ n δ₁) + 2π δ₂`.
pub fn state_bound_trials(trials: usize, seed: &[u8; 32]) -> Result<BoundTrials> {
    let out = (0..trials as u32)
        .into_par_iter()
        .map(|i| -> Result<(bool, f64)> {
            let mut rng = state_rng(seed, 0x5_0000, i);
            let n = rng.random_range(2..=6);
            let (d1, d2) = (pick_delta(&mut rng), pick_delta(&mut rng));
            let p = random_params(n, &mut rng)?;
            let q = perturb_params(&p, d1, d2, &mut rng)?;
            let a = crate::generator::build_state(&p)?;
            let b = crate::generator::build_state(&q)?;
            let td = trace_distance_pure(&a, &b)?;
            let bound = state_perturbation_bound(n, d1, d2);
            Ok((td <= bound, td / bound))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&out))
}

/// Half the Choi trace distance between function-like isometries built from
/// random parameters and a perturbation of them, at `n = m = 2`.
pub fn isometry_bound_trials(trials: usize, seed: &[u8; 32]) -> Result<BoundTrials> {
    const N: u32 = 2;
    const M: u32 = 2;
    let out = (0..trials as u32)
        .into_par_iter()
        .map(|i| -> Result<(bool, f64)> {
            let mut rng = state_rng(seed, 0x6_0000, i);
            let (d1, d2) = (pick_delta(&mut rng), pick_delta(&mut rng));
            let mut p = Vec::new();
            let mut q = Vec::new();
            for _ in 0..1 << M {
                let base = random_params(N, &mut rng)?;
                q.push(perturb_params(&base, d1, d2, &mut rng)?);
                p.push(base);
            }
            let ja = choi_of_isometry(&isometry_from_params(&p)?)?;
            let jb = choi_of_isometry(&isometry_from_params(&q)?)?;
            let dist = choi_trace_distance(&ja, &jb)?;
            let bound = isometry_perturbation_bound(N, M, d1, d2);
            Ok((dist <= bound, dist / bound))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&out))
}

fn summarize(out: &[(bool, f64)]) -> BoundTrials {
    BoundTrials {
        trials: out.len(),
        held: out.iter().filter(|o| o.0).count(),
        worst_ratio: out.iter().map(|o| o.1).fold(0.0, f64::max),
    }
}

fn bound_verdict(name: &str, t: BoundTrials) -> Verdict {
    Verdict::new(
        name,
        t.held == t.trials,
        format!("held in {}/{} trials, worst distance/bound {:.4}", t.held, t.trials, t.worst_ratio),
    )
}

pub fn lemma_bounds(trials: usize, isometry_trials: usize, seed: &[u8; 32]) -> Result<BatteryReport> {
    let verdicts = vec![
        bound_verdict("state-perturbation", state_bound_trials(trials, seed)?),
        bound_verdict("isometry-perturbation", isometry_bound_trials(isometry_trials, seed)?),
    ];
    Ok(BatteryReport::new(Battery::LemmaBounds, verdicts))
}

/// Entrywise largest deviation of the Gram matrix of `columns` from identity.
pub fn gram_deviation(columns: &[StateVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, a) in columns.iter().enumerate() {
        for (j, b) in columns.iter().enumerate() {
            let g = a.inner(b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g.re - target).hypot(g.im));
        }
    }
    Ok(worst)
}

/// Largest tolerated entry of `V†V − I`.
pub const ISOMETRY_TOLERANCE: f64 = 1e-9;

/// Function-like isometry at `n = m = 2`: built directly and through the
/// circuit, both checked for orthonormal columns, with the ancilla mass of
/// every circuit run recorded. `λ` is capped so the register fits the
/// simulator.
pub fn isometry(lambda: u32, seed: &[u8; 32]) -> Result<BatteryReport> {
    let (n, m) = (2, 2);
    let lambda = lambda.min(MAX_CIRCUIT_WIRES - 2 * n - 3 * m);
    let cfg = PrecisionConfig::new(n, m, lambda)?;
    let oracle = FunctionOracle::truly_random_from_rng(cfg, &mut state_rng(seed, 0x7_0000, 0));
    let direct = prfs_isometry(&oracle)?;
    let tables = OracleTables::from_oracle(&oracle)?;
    let mut circuit = Vec::new();
    let mut mass = 0.0f64;
    let mut path_gap = 0.0f64;
    for (x, target) in direct.iter().enumerate() {
        let register = StateVector::basis(cfg.m, x)?.tensor(&StateVector::zero_state(cfg.n));
        let run = simulate(&tables, &register, Stages::Both, CircuitOptions::default())?;
        mass = mass.max(run.ancilla_mass);
        path_gap = path_gap.max(trace_distance_pure(&run.state, target)?);
        circuit.push(run.state);
    }
    let gd = gram_deviation(&direct)?;
    let gc = gram_deviation(&circuit)?;
    let verdicts = vec![
        Verdict::new("isometry-direct", gd <= ISOMETRY_TOLERANCE, format!("max |V†V − I| = {gd:.3e} at λ = {lambda}")),
        Verdict::new("isometry-circuit", gc <= ISOMETRY_TOLERANCE, format!("max |V†V − I| = {gc:.3e}")),
        Verdict::new(
            "isometry-paths-agree",
            path_gap <= PATH_TOLERANCE,
            format!("largest column trace distance {path_gap:.3e}"),
        ),
        Verdict::new(
            "ancilla-clean",
            mass <= ANCILLA_TOLERANCE,
            format!("largest ancilla mass {mass:.3e}"),
        ),
    ];
    Ok(BatteryReport::new(Battery::Isometry, verdicts))
}

/// Largest tolerated trace distance between the circuit and direct paths.
pub const PATH_TOLERANCE: f64 = 1e-9;

/// Largest trace distance and ancilla mass over the runs of [`path_equivalence`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathTrials {
    pub runs: usize,
    pub worst_distance: f64,
    pub worst_ancilla_mass: f64,
}

/// Runs the state circuit and the direct generator on the same random
/// function for every `1 ≤ n ≤ max_n`, `1 ≤ λ ≤ max_lambda` and `seeds` seeds.
pub fn path_trials(max_n: u32, max_lambda: u32, seeds: usize, seed: &[u8; 32]) -> Result<PathTrials> {
    let mut jobs = Vec::new();
    for n in 1..=max_n {
        for lambda in 1..=max_lambda {
            for s in 0..seeds as u32 {
                jobs.push((n, lambda, s));
            }
        }
    }
    let out = jobs
        .into_par_iter()
        .map(|(n, lambda, s)| -> Result<(f64, f64)> {
            let cfg = PrecisionConfig::prs(n, lambda)?;
            let oracle = FunctionOracle::truly_random_from_rng(cfg, &mut state_rng(seed, (n << 8) | lambda, s));
            let direct = generate_prs(&oracle)?;
            let tables = OracleTables::from_oracle(&oracle)?;
            let run = simulate(&tables, &StateVector::zero_state(n), Stages::Both, CircuitOptions::default())?;
            Ok((trace_distance_pure(&run.state, &direct)?, run.ancilla_mass))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathTrials {
        runs: out.len(),
        worst_distance: out.iter().map(|o| o.0).fold(0.0, f64::max),
        worst_ancilla_mass: out.iter().map(|o| o.1).fold(0.0, f64::max),
    })
}

pub fn path_equivalence(max_n: u32, max_lambda: u32, seeds: usize, seed: &[u8; 32]) -> Result<BatteryReport> {
    let t = path_trials(max_n, max_lambda, seeds, seed)?;
    let verdicts = vec![
        Verdict::new(
            "circuit-matches-direct",
            t.worst_distance <= PATH_TOLERANCE,
            format!("largest trace distance {:.3e} over {} runs", t.worst_distance, t.runs),
        ),
        Verdict::new(
            "ancilla-clean",
            t.worst_ancilla_mass <= ANCILLA_TOLERANCE,
            format!("largest ancilla mass {:.3e}", t.worst_ancilla_mass),
        ),
    ];
    Ok(BatteryReport::new(Battery::PathEquivalence, verdicts))
}
