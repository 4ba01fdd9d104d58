//! Exact and statistical checks: trace and Choi distances, Haar sampling,
//! overlap moments, KS and total-variation tests, the perturbation bounds,
//! and the batteries and distinguisher built on them.

mod battery;
mod bounds;
mod choi;
mod distance;
mod distinguish;
mod ensemble;
mod haar;
mod moments;
mod report;
mod stats;

pub use battery::{
    gram_deviation, isometry, isometry_bound_trials, lemma_bounds, path_equivalence, path_trials, rounded_beta_histogram,
    run_battery, sampler_distance, state_bound_trials, Battery, BatteryReport, BatterySettings, BoundTrials, PathTrials,
    ISOMETRY_TOLERANCE, PATH_TOLERANCE, SAMPLER_CASES, SAMPLER_TV_TOLERANCE,
};
pub use bounds::{distinguishing_bound, isometry_perturbation_bound, state_perturbation_bound};
pub use choi::{choi_of_isometry, choi_trace_distance, choi_trace_distance_rank2, ChoiMatrix, MAX_CHOI_DIM};
pub use distance::trace_distance_pure;
pub use distinguish::{distinguisher_experiment, ks_ci_half_width, AdvantageReport, DistinguisherTest, FAMILY_ALPHA};
pub use ensemble::{
    battery_seed, collision_probabilities, disjoint_pair_overlaps, generate_ensemble, sample_state, state_rng, zero_marginals,
    EnsembleSource,
};
pub use haar::haar_sample;
pub use moments::{haar_moment, overlap_moment, overlap_moments, MomentEstimate};
pub use report::{
    haar_battery, EnsembleReport, HaarBatteryConfig, KsRecord, RawEnsembleData, Verdict, KS_LEVEL, MOMENT_SIGMAS,
    REPORT_SCHEMA_VERSION,
};
pub use stats::{kolmogorov_q, ks_p_value, ks_test, ks_two_sample, mean_and_se, tv_distance_discrete, KS_MIN_SAMPLES};
