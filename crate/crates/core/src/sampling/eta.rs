use std::sync::OnceLock;

use super::gamma::GammaEnvelopeConsts;

/// Safety factor applied to the numerically located maximum.
pub const ETA_SAFETY: f64 = 1.25;

const C_STEPS: usize = 96;
const X_STEPS: usize = 4096;
/// Right end of the x search window, in units of `1/c`.
const X_SPAN: f64 = 50.0;

fn abs_f_prime(k: &GammaEnvelopeConsts, x: f64) -> f64 {
    k.f_prime(x).map_or(0.0, f64::abs)
}

/// Maximum of `|f'|` over the search window for one envelope, by a dense grid
/// followed by golden-section refinement around the best grid point.
pub fn max_abs_f_prime(k: &GammaEnvelopeConsts) -> (f64, f64) {
    let lo = k.lower_edge();
    let hi = X_SPAN / k.c;
    let step = (hi - lo) / X_STEPS as f64;
    let mut best = (0.0, 0.0);
    for i in 1..X_STEPS {
        let x = lo + step * i as f64;
        let v = abs_f_prime(k, x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if abs_f_prime(k, x1) > abs_f_prime(k, x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let x = 0.5 * (a + b);
    let v = abs_f_prime(k, x);
    if v > best.1 {
        (x, v)
    } else {
        best
    }
}

/// Largest `|f'|` found over `c ∈ (0, 1/√6]`, i.e. every shape `alpha >= 1`.
pub fn eta_raw() -> f64 {
    let c_max = 1.0 / 6f64.sqrt();
    (1..=C_STEPS)
        .map(|i| c_max * i as f64 / C_STEPS as f64)
        .map(|c| max_abs_f_prime(&GammaEnvelopeConsts::from_c(c)).1)
        .fold(0.0, f64::max)
}

/// Cached upper bound on `|f'|`, at least 1.
pub fn eta_bound() -> f64 {
    static ETA: OnceLock<f64> = OnceLock::new();
    *ETA.get_or_init(|| (ETA_SAFETY * eta_raw()).max(1.0))
}

/// Internal sampler precision `3m + 3 + ceil(log2(eta + 3))`.
pub fn internal_bits(m: u32) -> u32 {
    3 * m + 3 + (eta_bound() + 3.0).log2().ceil() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_vanishes_at_origin_and_edges() {
        for alpha in [1.0, 2.0, 7.0, 300.0] {
            let k = GammaEnvelopeConsts::new(alpha).unwrap();
            assert_eq!(k.f_prime(0.0).unwrap(), 0.0);
            let near_left = k.lower_edge() * (1.0 - 1e-9);
            assert!(abs_f_prime(&k, near_left) < 1e-6);
            assert!(abs_f_prime(&k, X_SPAN / k.c) < 1e-12);
        }
    }

    #[test]
    fn bound_dominates_dense_grid() {
        let eta = eta_bound();
        assert!(eta >= 1.0);
        let c_max = 1.0 / 6f64.sqrt();
        for i in 1..=40 {
            let k = GammaEnvelopeConsts::from_c(c_max * i as f64 / 40.0);
            let (lo, hi) = (k.lower_edge(), X_SPAN / k.c);
            for j in 1..20_000 {
                let x = lo + (hi - lo) * j as f64 / 20_000.0;
                assert!(abs_f_prime(&k, x) <= eta);
            }
        }
    }

    #[test]
    fn internal_bits_formula() {
        let extra = (eta_bound() + 3.0).log2().ceil() as u32;
        assert_eq!(extra, 3);
        assert_eq!(internal_bits(8), 30);
        assert!(internal_bits(1) > 3 + 4);
    }
}
