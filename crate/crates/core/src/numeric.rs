//! Scalar numerics shared by the analytic modules: bracketing root finders,
//! adaptive Simpson quadrature and log-space combinatorics.

use libm::{exp, lgamma, log, log1p};

/// Root of a non-decreasing function on `[lo, hi]`, bisected until the
/// bracket cannot shrink any further in `f64`.
///
/// The endpoints are never evaluated, so `f` may be singular there. If `f`
/// has no sign change the result collapses onto the corresponding endpoint.
pub fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(lo <= hi);
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v < 0.0 {
            lo = mid;
        } else if v > 0.0 {
            hi = mid;
        } else {
            return mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (delta.abs() <= 15.0 * tol && (m - a) < 0.25) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `log(p / (1 - p))`.
pub fn logit(p: f64) -> f64 {
    log(p) - log1p(-p)
}

/// Inverse of [`logit`] written to stay finite for large `|x|`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}

/// `log C(a, b)`, or `-inf` when the coefficient vanishes.
pub fn ln_binomial(a: u64, b: u64) -> f64 {
    if b > a {
        return f64::NEG_INFINITY;
    }
    if b == 0 || b == a {
        return 0.0;
    }
    lgamma(a as f64 + 1.0) - lgamma(b as f64 + 1.0) - lgamma((a - b) as f64 + 1.0)
}

/// `log(sum(exp(x)))` over `terms`; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = terms.iter().map(|&t| exp(t - max)).sum();
    max + log(sum)
}

/// Number of salt particles `floor(c * n)`.
///
/// A relative slack of a few ulps keeps exact products such as
/// `(2/9) * 9` from rounding down to 1.
pub fn salt_count(c: f64, n: u64) -> u64 {
    let x = c * n as f64;
    let floor = libm::floor(x);
    if x - floor > 1.0 - 1e-9 * x.max(1.0) {
        floor as u64 + 1
    } else {
        floor as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect_increasing(|x| x * x - 2.0, 0.0, 2.0);
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn simpson_integrates_log_singularity() {
        // ∫_0^1 atanh(x) dx = log 2 diverges only logarithmically at 1.
        let v = adaptive_simpson(libm::atanh, 0.0, 1.0 - 1e-12, 1e-10);
        assert!((v - core::f64::consts::LN_2).abs() < 1e-9, "{v}");
    }

    #[test]
    fn salt_count_is_robust_to_rounding() {
        assert_eq!(salt_count(2.0 / 9.0, 9), 2);
        assert_eq!(salt_count(0.1, 1024), 102);
        assert_eq!(salt_count(0.2, 1600), 320);
        assert_eq!(salt_count(0.0, 50), 0);
        assert_eq!(salt_count(0.999, 10), 9);
    }

    #[test]
    fn logit_round_trip() {
        for &p in &[1e-12, 0.1, 0.5, 0.9, 1.0 - 1e-9] {
            assert!((logistic(logit(p)) - p).abs() < 1e-12 * p.max(1e-3));
        }
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let t = [0.1, -2.0, 3.5];
        let direct = libm::log(t.iter().map(|&x| libm::exp(x)).sum::<f64>());
        assert!((log_sum_exp(&t) - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
