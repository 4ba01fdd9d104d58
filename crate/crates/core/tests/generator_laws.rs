//! Statistical properties of generated states and of the oracle backends.

use haarforge_core::generator::{generate_prfs_column, generate_prs, sample_tree};
use haarforge_core::numerics::regularized_incomplete_beta;
use haarforge_core::verify::{ks_test, mean_and_se, state_bound_trials, state_rng};
use haarforge_core::{FunctionOracle, PrecisionConfig, PrfKey};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

#[test]
fn single_qubit_beta_is_uniform() {
    let cfg = PrecisionConfig::prs(1, 16).unwrap();
    let mut betas: Vec<f64> = (0..100_000u32)
        .into_par_iter()
        .map(|i| {
            let oracle = FunctionOracle::truly_random_from_rng(cfg, &mut state_rng(&[0x21; 32], 0, i));
            sample_tree(&oracle, None).unwrap().beta(0, 0).to_f64()
        })
        .collect();
    betas.sort_by(f64::total_cmp);
    let (d, _) = ks_test(&betas, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(d <= 0.01, "KS distance {d}");
}

#[test]
fn states_are_normalized_and_marginal_follows_haar_law() {
    let cfg = PrecisionConfig::prs(3, 16).unwrap();
    let states: Vec<_> = (0..10_000u32)
        .into_par_iter()
        .map(|i| generate_prs(&FunctionOracle::truly_random_from_rng(cfg, &mut state_rng(&[0x22; 32], 0, i))).unwrap())
        .collect();
    for s in &states[..1000] {
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
    let mut marg: Vec<f64> = states.iter().map(|s| s.amplitudes()[0].norm_sqr()).collect();
    marg.sort_by(f64::total_cmp);
    let (d, _) = ks_test(&marg, |x| regularized_incomplete_beta(1.0, 7.0, x.clamp(0.0, 1.0)).unwrap()).unwrap();
    assert!(d <= 0.02, "KS distance {d}");
}

#[test]
fn function_like_columns_overlap_like_independent_haar_states() {
    let cfg = PrecisionConfig::new(3, 1, 16).unwrap();
    let overlaps: Vec<f64> = (0..1000u32)
        .into_par_iter()
        .map(|i| {
            let oracle = FunctionOracle::truly_random_from_rng(cfg, &mut state_rng(&[0x23; 32], 0, i));
            let a = generate_prfs_column(&oracle, 0).unwrap();
            let b = generate_prfs_column(&oracle, 1).unwrap();
            assert_eq!(a, generate_prfs_column(&oracle, 0).unwrap());
            a.inner(&b).unwrap().norm_sqr()
        })
        .collect();
    let (mean, se) = mean_and_se(&overlaps);
    assert!((mean - 0.125).abs() <= 3.0 * se, "{mean} ± {se}");
}

#[test]
fn state_perturbation_bound_holds() {
    let t = state_bound_trials(1000, &[0x24; 32]).unwrap();
    assert_eq!(t.held, t.trials, "worst ratio {}", t.worst_ratio);
}

/// χ² (one degree of freedom) of the count of one bits against a fair coin.
fn bit_balance_chi2(bytes: &[u8]) -> f64 {
    let n = bytes.len() as f64 * 8.0;
    let ones: u32 = bytes.iter().map(|b| b.count_ones()).sum();
    let dev = ones as f64 - n / 2.0;
    dev * dev / (n / 4.0)
}

#[test]
fn oracle_outputs_are_balanced_and_seed_dependent() {
    // 10.83 is the 0.999 quantile of χ² with one degree of freedom.
    const CRITICAL: f64 = 10.83;
    let cfg = PrecisionConfig::new(4, 2, 16).unwrap();
    let a = FunctionOracle::truly_random(cfg, b"first seed");
    let b = FunctionOracle::truly_random(cfg, b"second seed");
    let key = PrfKey::generate(cfg, &mut ChaCha20Rng::seed_from_u64(0x25));
    let k = FunctionOracle::keyed(key);
    let mut xa = Vec::new();
    let mut xb = Vec::new();
    let mut xk = Vec::new();
    let mut xor = Vec::new();
    let mut differing = 0;
    for index in 0..1u64 << a.input_bits() {
        let (oa, ob, ok) = (a.eval(index).unwrap(), b.eval(index).unwrap(), k.eval(index).unwrap());
        assert_eq!(oa, a.eval(index).unwrap());
        assert_eq!(ok, k.eval(index).unwrap());
        differing += usize::from(oa != ob);
        xor.extend(oa.iter().zip(ob.iter()).map(|(p, q)| p ^ q));
        xa.extend_from_slice(&oa);
        xb.extend_from_slice(&ob);
        xk.extend_from_slice(&ok);
    }
    assert_eq!(differing, 1 << a.input_bits());
    for (name, bytes) in [("a", &xa), ("b", &xb), ("prf", &xk), ("a^b", &xor)] {
        let chi2 = bit_balance_chi2(bytes);
        assert!(chi2 < CRITICAL, "{name}: chi2 {chi2}");
    }
}
