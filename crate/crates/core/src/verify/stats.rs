use crate::error::{Error, Result};

/// Smallest sample accepted by the one-sample test.
pub const KS_MIN_SAMPLES: usize = 30;

/// Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut previous = 0.0f64;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() <= 1e-12 * previous.abs().max(sum.abs()) || term.abs() < 1e-300 {
            return (2.0 * sum).clamp(0.0, 1.0);
        }
        sign = -sign;
        previous = term;
    }
    1.0
}

/// Asymptotic p-value for statistic `d` with effective sample size `ne`,
/// with the usual small-sample correction to the scaling.
pub fn ks_p_value(d: f64, ne: f64) -> f64 {
    let root = ne.sqrt();
    kolmogorov_q((root + 0.12 + 0.11 / root) * d)
}

fn check_sorted(samples: &[f64]) -> Result<()> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Stats("samples contain NaN".into()));
    }
    if samples.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Stats("samples must be sorted ascending".into()));
    }
    Ok(())
}

/// One-sample Kolmogorov–Smirnov test of sorted `samples` against `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::Stats(format!(
            "need at least {KS_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    check_sorted(samples)?;
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let d = d.clamp(0.0, 1.0);
    Ok((d, ks_p_value(d, n)))
}

/// Two-sample Kolmogorov–Smirnov test; sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Stats("two-sample test needs nonempty samples".into()));
    }
    if a.iter().chain(b.iter()).any(|x| x.is_nan()) {
        return Err(Error::Stats("samples contain NaN".into()));
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok((d, ks_p_value(d, na * nb / (na + nb))))
}

/// `½ Σ |count_k / total − p_k|` over aligned grids.
pub fn tv_distance_discrete(counts: &[u64], exact: &[f64]) -> Result<f64> {
    if counts.len() != exact.len() {
        return Err(Error::Stats(format!(
            "grid mismatch: {} histogram cells vs {} exact masses",
            counts.len(),
            exact.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Stats("empty histogram".into()));
    }
    let total = total as f64;
    Ok(0.5
        * counts
            .iter()
            .zip(exact)
            .map(|(&c, &p)| (c as f64 / total - p).abs())
            .sum::<f64>())
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
