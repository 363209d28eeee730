use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use libm::exp;

use super::state::Lattice;
use crate::error::{Error, Result};
use crate::numeric::salt_count;
use crate::params::ModelParams;
use crate::salt::binomial;

/// Largest number of `(spin, salt)` configurations summed directly.
pub const STATE_CAP: u128 = 100_000_000;

/// Exact Gibbs measure of a small box at fixed salt number.
///
/// Spin configurations are indexed by bit masks: bit `x` set means `s_x = +1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub sites: usize,
    pub salt: u64,
    /// Joint law of `(M, Q)`.
    pub joint: BTreeMap<(i64, u64), f64>,
    /// `P(s_x = +1)` per site.
    pub spin_marginal: Vec<f64>,
    /// `P(S_x = 1)` per site.
    pub salt_marginal: Vec<f64>,
    /// Spin marginal `P(sigma)` with salt summed out.
    pub spin_law: Vec<f64>,
    /// `P(sigma)` of the Ising model with the same `J`, `h` and boundary and
    /// no salt.
    pub ising_law: Vec<f64>,
    /// Largest relative spread of the weights of salt configurations sharing
    /// the same spins and the same `Q`; zero when the salt weight depends on
    /// the salt only through `Q`.
    pub salt_weight_spread: f64,
}

impl ExactDistribution {
    /// `P(sigma | M)` for `law` (either [`Self::spin_law`] or
    /// [`Self::ising_law`]).
    pub fn conditional_on_m(&self, law: &[f64]) -> Vec<f64> {
        let mut by_m = vec![0.0; self.sites + 1];
        for (mask, &p) in law.iter().enumerate() {
            by_m[(mask as u64).count_ones() as usize] += p;
        }
        law.iter()
            .enumerate()
            .map(|(mask, &p)| {
                let total = by_m[(mask as u64).count_ones() as usize];
                if total > 0.0 {
                    p / total
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// `E[Q (n- - N + Q)] / E[(n+ - Q)(N - Q)]`, equal to `e^kappa` whenever
    /// both sides are nonzero.
    pub fn pooled_odds(&self) -> f64 {
        let (n, salt) = (self.sites as f64, self.salt as f64);
        let (mut num, mut den) = (0.0, 0.0);
        for (&(m, q), &p) in &self.joint {
            let plus = 0.5 * (n + m as f64);
            let q = q as f64;
            num += p * q * (n - plus - salt + q);
            den += p * (plus - q) * (salt - q);
        }
        num / den
    }

    /// `max_sigma |P(sigma | M) - P_Ising(sigma | M)|`.
    pub fn conditional_deviation(&self) -> f64 {
        let a = self.conditional_on_m(&self.spin_law);
        let b = self.conditional_on_m(&self.ising_law);
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// `2^{L^d} C(L^d, N)`.
pub fn state_count(sites: usize, salt: u64) -> u128 {
    if sites >= 127 {
        return u128::MAX;
    }
    let spins = 1u128 << sites;
    let salts = binomial(sites as u64, salt);
    let digits = salts.to_u64_digits();
    match digits.as_slice() {
        [] => 0,
        [lo] => spins.saturating_mul(*lo as u128),
        _ => u128::MAX,
    }
}

fn spins_of(mask: u64, sites: usize) -> Vec<i8> {
    (0..sites)
        .map(|x| if mask >> x & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// Subsets of `0..n` with `k` elements as bit masks, in increasing order.
fn subsets(n: usize, k: u64) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let mut next = if k == 0 {
        Some(0)
    } else {
        Some((1u64 << k) - 1)
    };
    core::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            Some((((ripple ^ cur) >> 2) / low) | ripple)
        };
        Some(cur)
    })
}

/// Sums `exp(-beta H)` over every spin and salt configuration of the box of
/// side `side` with `floor(c L^d)` salt particles.
///
/// Fails with [`Error::StateSpaceTooLarge`] above [`STATE_CAP`] states.
pub fn exact_enumerate(params: &ModelParams, side: usize) -> Result<ExactDistribution> {
    let params = params.validate()?;
    let lattice = Lattice::new(side, params.d)?;
    let n = lattice.sites();
    let salt = salt_count(params.c, n as u64);
    let states = state_count(n, salt);
    if states > STATE_CAP {
        return Err(Error::StateSpaceTooLarge {
            states,
            cap: STATE_CAP,
        });
    }
    let ModelParams {
        j, h, kappa, bc, ..
    } = params;
    let boundary = bc.spin();
    let salt_masks: Vec<u64> = subsets(n, salt).collect();

    let ising_energy: Vec<f64> = (0..1u64 << n)
        .map(|mask| {
            let spins = spins_of(mask, n);
            let m: i64 = spins.iter().map(|&s| s as i64).sum();
            -j * lattice.bond_sum(&spins, boundary) as f64 - h * m as f64
        })
        .collect();
    // the salt penalty is non-negative, so this shift keeps every weight <= 1
    let shift = ising_energy.iter().copied().fold(f64::INFINITY, f64::min);

    let mut joint: BTreeMap<(i64, u64), f64> = BTreeMap::new();
    let mut spin_marginal = vec![0.0; n];
    let mut salt_marginal = vec![0.0; n];
    let mut spin_law = vec![0.0; 1 << n];
    let mut ising_law = vec![0.0; 1 << n];
    let mut spread = 0.0f64;
    let mut by_q = vec![(f64::INFINITY, f64::NEG_INFINITY); salt as usize + 1];

    for (mask, &e) in ising_energy.iter().enumerate() {
        let mask = mask as u64;
        let spins = spins_of(mask, n);
        let m = 2 * mask.count_ones() as i64 - n as i64;
        let base = exp(shift - e);
        ising_law[mask as usize] = base;
        by_q.iter_mut()
            .for_each(|r| *r = (f64::INFINITY, f64::NEG_INFINITY));
        let mut total = 0.0;
        for &s in &salt_masks {
            let q = (s & mask).count_ones() as u64;
            // salt energy summed site by site
            let penalty: f64 = (0..n)
                .filter(|&x| s >> x & 1 == 1)
                .map(|x| kappa * 0.5 * (1 - spins[x]) as f64)
                .sum();
            let w = base * exp(-penalty);
            let r = &mut by_q[q as usize];
            *r = (r.0.min(w), r.1.max(w));
            total += w;
            *joint.entry((m, q)).or_default() += w;
            for x in (0..n).filter(|&x| s >> x & 1 == 1) {
                salt_marginal[x] += w;
            }
        }
        for &(lo, hi) in &by_q {
            if hi > 0.0 {
                spread = spread.max((hi - lo) / hi);
            }
        }
        spin_law[mask as usize] = total;
        for (x, &sx) in spins.iter().enumerate() {
            if sx == 1 {
                spin_marginal[x] += total;
            }
        }
    }

    let z: f64 = spin_law.iter().sum();
    let z_ising: f64 = ising_law.iter().sum();
    joint.values_mut().for_each(|p| *p /= z);
    spin_marginal.iter_mut().for_each(|p| *p /= z);
    salt_marginal.iter_mut().for_each(|p| *p /= z);
    spin_law.iter_mut().for_each(|p| *p /= z);
    ising_law.iter_mut().for_each(|p| *p /= z_ising);
    Ok(ExactDistribution {
        sites: n,
        salt,
        joint,
        spin_marginal,
        salt_marginal,
        spin_law,
        ising_law,
        salt_weight_spread: spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Boundary;

    fn params(h: f64, kappa: f64, c: f64, bc: Boundary) -> ModelParams {
        ModelParams {
            j: 0.4,
            h,
            kappa,
            c,
            d: 2,
            bc,
        }
    }

    #[test]
    fn subsets_enumerate_combinations() {
        assert_eq!(subsets(4, 0).collect::<Vec<_>>(), [0]);
        assert_eq!(subsets(4, 2).count(), 6);
        assert!(subsets(5, 3).all(|s| s.count_ones() == 3 && s < 32));
        assert_eq!(subsets(3, 3).collect::<Vec<_>>(), [7]);
    }

    #[test]
    fn state_count_and_cap() {
        assert_eq!(state_count(9, 2), 512 * 36);
        let err = exact_enumerate(&params(0.0, 1.0, 0.2, Boundary::Plus), 6).unwrap_err();
        assert!(matches!(err, Error::StateSpaceTooLarge { .. }));
    }

    #[test]
    fn normalized() {
        let e = exact_enumerate(&params(-0.05, 1.0, 2.0 / 9.0, Boundary::Plus), 3).unwrap();
        assert_eq!(e.salt, 2);
        assert!((e.joint.values().sum::<f64>() - 1.0).abs() < 1e-13);
        assert!((e.salt_marginal.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert_eq!(e.salt_weight_spread, 0.0);
        assert!(e.conditional_deviation() < 1e-12);
        assert!((e.pooled_odds() - 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn no_salt_is_pure_ising() {
        let e = exact_enumerate(&params(0.1, 2.0, 0.0, Boundary::Minus), 3).unwrap();
        for (a, b) in e.spin_law.iter().zip(&e.ising_law) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(e.joint.keys().all(|&(_, q)| q == 0));
    }

    #[test]
    fn flip_symmetry_without_field_and_penalty() {
        let plus = exact_enumerate(&params(0.0, 0.0, 0.3, Boundary::Plus), 3).unwrap();
        let minus = exact_enumerate(&params(0.0, 0.0, 0.3, Boundary::Minus), 3).unwrap();
        let full = (1usize << 9) - 1;
        for mask in 0..=full {
            let (a, b) = (plus.spin_law[mask], minus.spin_law[full ^ mask]);
            assert!((a - b).abs() <= 1e-13 * a, "{mask}: {a} {b}");
        }
        for (a, b) in plus.spin_marginal.iter().zip(&minus.spin_marginal) {
            assert!((a + b - 1.0).abs() < 1e-14);
        }
    }
}
