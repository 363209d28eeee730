//! Salt-side combinatorics.
//!
//! With total magnetization `m`, concentration `c` and a fraction `theta` of
//! the salt on plus spins, the occupation probabilities are
//! `p+ = 2 theta c / (1 + m)` and `p- = 2 (1 - theta) c / (1 - m)`, and the
//! number of salt placements grows like `exp(n xi(m, theta; c))`.

use alloc::vec::Vec;
use libm::{log, log1p};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect_increasing, ln_binomial, log_sum_exp, logit, salt_count};

/// `p log p + (1 - p) log(1 - p)` with `0 log 0 = 0`; `+inf` outside `[0, 1]`.
pub fn bernoulli_entropy(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::INFINITY;
    }
    let a = if p == 0.0 { 0.0 } else { p * log(p) };
    let b = if p == 1.0 { 0.0 } else { (1.0 - p) * log1p(-p) };
    a + b
}

/// A split of the salt between plus and minus spins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaltSplit {
    pub m: f64,
    pub theta: f64,
    pub c: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

impl SaltSplit {
    pub fn new(m: f64, theta: f64, c: f64) -> Self {
        SaltSplit {
            m,
            theta,
            c,
            p_plus: 2.0 * theta * c / (1.0 + m),
            p_minus: 2.0 * (1.0 - theta) * c / (1.0 - m),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.p_plus <= 1.0 && self.p_minus <= 1.0
    }

    /// `p+ (1+m)/2 + p- (1-m)/2`, equal to `c` by construction.
    pub fn mass(&self) -> f64 {
        0.5 * (self.p_plus * (1.0 + self.m) + self.p_minus * (1.0 - self.m))
    }
}

/// Salt entropy `xi(m, theta; c) = -(1+m)/2 S(p+) - (1-m)/2 S(p-)`.
///
/// Returns `-inf` when either occupation probability exceeds 1.
pub fn xi(m: f64, theta: f64, c: f64) -> f64 {
    let s = SaltSplit::new(m, theta, c);
    if !s.is_feasible() {
        return f64::NEG_INFINITY;
    }
    0.0 - 0.5 * (1.0 + m) * bernoulli_entropy(s.p_plus)
        - 0.5 * (1.0 - m) * bernoulli_entropy(s.p_minus)
}

fn check_parity(n: u64, total_spin: i64) -> Result<(u64, u64)> {
    if total_spin.unsigned_abs() > n || (n as i128 + total_spin as i128) % 2 != 0 {
        return Err(Error::Parity { n, total_spin });
    }
    let plus = ((n as i128 + total_spin as i128) / 2) as u64;
    Ok((plus, n - plus))
}

/// Exact binomial coefficient.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b);
    let mut acc = BigUint::from(1u32);
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Natural logarithm of a big integer (`-inf` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = x >> shift;
    let digits = top.to_u64_digits();
    let mantissa = digits.first().copied().unwrap_or(0) as f64;
    log(mantissa) + shift as f64 * core::f64::consts::LN_2
}

/// Number of ways to put `salt` particles on `n` sites with total spin
/// `total_spin` so that exactly `on_plus` of them sit on plus spins:
/// `C((n+M)/2, Q) C((n-M)/2, N-Q)`.
pub fn count_salt_configs(n: u64, total_spin: i64, salt: u64, on_plus: u64) -> Result<BigUint> {
    let (plus, minus) = check_parity(n, total_spin)?;
    if on_plus > salt || salt > n {
        return Ok(BigUint::from(0u32));
    }
    Ok(binomial(plus, on_plus) * binomial(minus, salt - on_plus))
}

/// `log sum_Q C((n+M)/2, Q) C((n-M)/2, N-Q) e^{kappa Q}` with `N = floor(c n)`:
/// the salt part of the Boltzmann weight summed over placements.
pub fn log_salt_weight(n: u64, total_spin: i64, c: f64, kappa: f64) -> Result<f64> {
    let (plus, minus) = check_parity(n, total_spin)?;
    let salt = salt_count(c, n);
    let lo = salt.saturating_sub(minus);
    let hi = salt.min(plus);
    let terms: Vec<f64> = (lo..=hi)
        .map(|q| ln_binomial(plus, q) + ln_binomial(minus, salt - q) + kappa * q as f64)
        .collect();
    Ok(log_sum_exp(&terms))
}

/// The salt split minimizing `-kappa theta c - xi(m, theta; c)` at fixed
/// `(m, c)`: the unique `theta` with `logit(p+) - logit(p-) = kappa`.
///
/// Bisects over the feasible `theta` interval. At `c = 0` the split is
/// undetermined and the independent placement `theta = (1+m)/2` is returned.
pub fn optimal_theta(m: f64, c: f64, kappa: f64) -> Result<SaltSplit> {
    if m.is_nan() || m.abs() >= 1.0 {
        return Err(Error::OutOfDomain { m });
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::param("c", "c out of [0,1)"));
    }
    if kappa.is_nan() || kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::param("kappa", "kappa negative"));
    }
    if c == 0.0 {
        return Ok(SaltSplit::new(m, 0.5 * (1.0 + m), 0.0));
    }
    // feasible theta: p+ <= 1 and p- <= 1
    let lo = (1.0 - (1.0 - m) / (2.0 * c)).max(0.0);
    let hi = ((1.0 + m) / (2.0 * c)).min(1.0);
    if lo > hi {
        return Err(Error::Infeasible { m, c });
    }
    let gap = |theta: f64| {
        let s = SaltSplit::new(m, theta, c);
        logit(s.p_plus) - logit(s.p_minus) - kappa
    };
    let theta = bisect_increasing(gap, lo, hi);
    Ok(SaltSplit::new(m, theta, c))
}

/// `log(count) / n` for the lattice `(n, floor(m n), floor(c n), floor(theta c n))`,
/// with the spin total lowered by one when needed to match the parity of `n`.
pub fn count_rate(n: u64, m: f64, theta: f64, c: f64) -> Result<f64> {
    let mut total = libm::floor(m * n as f64) as i64;
    if (n as i64 + total) % 2 != 0 {
        total -= 1;
    }
    let salt = salt_count(c, n);
    let on_plus = salt_count(theta * c, n);
    Ok(ln_big(&count_salt_configs(n, total, salt, on_plus)?) / n as f64)
}
