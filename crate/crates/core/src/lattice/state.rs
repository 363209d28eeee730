use alloc::vec;
use alloc::vec::Vec;
use libm::exp;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::salt_count;
use crate::params::ModelParams;

/// Neighbor slot pointing at the frozen boundary shell.
pub const SHELL: u32 = u32::MAX;

/// Geometry of the box `{0..L}^d` with nearest-neighbor bonds.
///
/// Sites are numbered `x = sum_k coord_k L^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    side: usize,
    dim: usize,
    sites: usize,
    neighbors: Vec<u32>,
}

impl Lattice {
    pub fn new(side: usize, dim: u32) -> Result<Self> {
        if side == 0 {
            return Err(Error::param("L", "L must be at least 1"));
        }
        if dim == 0 {
            return Err(Error::param("d", "d must be at least 1"));
        }
        let dim = dim as usize;
        let sites = (0..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(side))
            .filter(|&n| n < SHELL as usize)
            .ok_or_else(|| Error::param("L", "L^d too large"))?;
        let mut neighbors = vec![SHELL; sites * 2 * dim];
        let mut stride = 1;
        for k in 0..dim {
            for x in 0..sites {
                let coord = (x / stride) % side;
                if coord > 0 {
                    neighbors[x * 2 * dim + 2 * k] = (x - stride) as u32;
                }
                if coord + 1 < side {
                    neighbors[x * 2 * dim + 2 * k + 1] = (x + stride) as u32;
                }
            }
            stride *= side;
        }
        Ok(Lattice {
            side,
            dim,
            sites,
            neighbors,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// The `2d` neighbors of `x`; [`SHELL`] marks a boundary neighbor.
    pub fn neighbors(&self, x: usize) -> &[u32] {
        let k = 2 * self.dim;
        &self.neighbors[x * k..(x + 1) * k]
    }

    /// `sum_{<x,y> in box} s_x s_y + sum_{x in box, y in shell} s_x b`.
    pub fn bond_sum(&self, spins: &[i8], boundary: i8) -> i64 {
        let mut total = 0i64;
        for (x, &s) in spins.iter().enumerate() {
            for &y in self.neighbors(x) {
                if y == SHELL {
                    total += (s * boundary) as i64;
                } else if (y as usize) > x {
                    total += (s * spins[y as usize]) as i64;
                }
            }
        }
        total
    }
}

/// Acceptance probability of a proposal with energy change `delta`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptanceRule {
    /// `min(1, e^{-delta})`.
    #[default]
    Metropolis,
    /// `min(1, e^{-s delta})`: samples the wrong measure unless `s = 1`.
    /// Used as a negative control for the validation suite.
    Tempered(f64),
}

impl AcceptanceRule {
    pub fn is_metropolis(&self) -> bool {
        *self == AcceptanceRule::Metropolis
    }

    fn accept<R: Rng + ?Sized>(self, delta: f64, rng: &mut R) -> bool {
        let delta = match self {
            AcceptanceRule::Metropolis => delta,
            AcceptanceRule::Tempered(s) => s * delta,
        };
        delta <= 0.0 || rng.gen::<f64>() < exp(-delta)
    }
}

/// Outcome of a salt swap proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapOutcome {
    Accepted,
    Rejected,
    /// The source was empty or the target occupied; nothing changed.
    Invalid,
}

/// A cached quantity that disagrees with recomputation from the arrays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheMismatch {
    pub field: &'static str,
    pub cached: f64,
    pub recomputed: f64,
}

/// Spins and salt on the box with a frozen spin shell and no salt outside.
///
/// Caches the total spin `M`, the salt count `N`, the salt on plus spins `Q`,
/// the bond sum, and the reduced energy
/// `beta H = -J bonds - h M + kappa (N - Q)`, all updated incrementally.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    params: ModelParams,
    lattice: Lattice,
    boundary: i8,
    rule: AcceptanceRule,
    spins: Vec<i8>,
    salt: Vec<bool>,
    occupied: Vec<u32>,
    empty: Vec<u32>,
    // position of each site in `occupied` or `empty`
    slot: Vec<u32>,
    total_spin: i64,
    salt_on_plus: u64,
    bonds: i64,
    energy: f64,
}

impl LatticeState {
    /// All spins at the boundary value and salt on the listed sites.
    pub fn new(params: &ModelParams, side: usize, salt_sites: &[usize]) -> Result<Self> {
        let params = params.validate()?;
        let lattice = Lattice::new(side, params.d)?;
        let n = lattice.sites();
        let boundary = params.bc.spin();
        let mut salt = vec![false; n];
        for &x in salt_sites {
            if x >= n || salt[x] {
                return Err(Error::param(
                    "salt",
                    "salt sites must be distinct sites of the box",
                ));
            }
            salt[x] = true;
        }
        let mut state = LatticeState {
            params,
            spins: vec![boundary; n],
            salt,
            occupied: Vec::new(),
            empty: Vec::new(),
            slot: vec![0; n],
            boundary,
            rule: AcceptanceRule::Metropolis,
            lattice,
            total_spin: 0,
            salt_on_plus: 0,
            bonds: 0,
            energy: 0.0,
        };
        state.rebuild();
        Ok(state)
    }

    /// Overwrites the spins and recomputes every cache.
    pub fn set_spins(&mut self, spins: &[i8]) -> Result<()> {
        if spins.len() != self.spins.len() || spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::param(
                "spins",
                "spins must be +1 or -1 on every site",
            ));
        }
        self.spins.copy_from_slice(spins);
        self.rebuild();
        Ok(())
    }

    fn rebuild(&mut self) {
        self.occupied.clear();
        self.empty.clear();
        for x in 0..self.spins.len() {
            let list = if self.salt[x] {
                &mut self.occupied
            } else {
                &mut self.empty
            };
            self.slot[x] = list.len() as u32;
            list.push(x as u32);
        }
        let (m, q, b) = self.recount();
        self.total_spin = m;
        self.salt_on_plus = q;
        self.bonds = b;
        self.energy = self.exact_energy();
    }

    fn recount(&self) -> (i64, u64, i64) {
        let m = self.spins.iter().map(|&s| s as i64).sum();
        let q = self
            .spins
            .iter()
            .zip(&self.salt)
            .filter(|(&s, &a)| a && s == 1)
            .count() as u64;
        (m, q, self.lattice.bond_sum(&self.spins, self.boundary))
    }

    /// `beta H` from the integer caches.
    pub fn exact_energy(&self) -> f64 {
        let ModelParams { j, h, kappa, .. } = self.params;
        let on_minus = self.salt_count() - self.salt_on_plus;
        -j * self.bonds as f64 - h * self.total_spin as f64 + kappa * on_minus as f64
    }

    /// Recomputes every cache from the arrays and compares; the energy is
    /// allowed a relative error of `1e-8`.
    pub fn verify_caches(&self) -> core::result::Result<(), CacheMismatch> {
        let (m, q, b) = self.recount();
        let n = self.salt.iter().filter(|&&a| a).count() as u64;
        let checks = [
            ("M", self.total_spin as f64, m as f64),
            ("N", self.occupied.len() as f64, n as f64),
            ("Q", self.salt_on_plus as f64, q as f64),
            ("bonds", self.bonds as f64, b as f64),
        ];
        for (field, cached, recomputed) in checks {
            if cached != recomputed {
                return Err(CacheMismatch {
                    field,
                    cached,
                    recomputed,
                });
            }
        }
        let ModelParams { j, h, kappa, .. } = self.params;
        let fresh = -j * b as f64 - h * m as f64 + kappa * (n - q) as f64;
        if (self.energy - fresh).abs() > 1e-8 * fresh.abs().max(1.0) {
            return Err(CacheMismatch {
                field: "energy",
                cached: self.energy,
                recomputed: fresh,
            });
        }
        for (x, &s) in self.slot.iter().enumerate() {
            let list = if self.salt[x] {
                &self.occupied
            } else {
                &self.empty
            };
            if list.get(s as usize) != Some(&(x as u32)) {
                return Err(CacheMismatch {
                    field: "site lists",
                    cached: s as f64,
                    recomputed: x as f64,
                });
            }
        }
        Ok(())
    }

    pub fn set_acceptance(&mut self, rule: AcceptanceRule) {
        self.rule = rule;
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn sites(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn salt(&self) -> &[bool] {
        &self.salt
    }

    pub fn total_spin(&self) -> i64 {
        self.total_spin
    }

    pub fn salt_count(&self) -> u64 {
        self.occupied.len() as u64
    }

    pub fn salt_on_plus(&self) -> u64 {
        self.salt_on_plus
    }

    /// Number of plus spins, `(L^d + M) / 2`.
    pub fn plus_count(&self) -> u64 {
        ((self.sites() as i64 + self.total_spin) / 2) as u64
    }

    /// Incrementally maintained `beta H`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Sum of the neighbor spins of `x`, shell included.
    pub fn local_field(&self, x: usize) -> i64 {
        self.lattice
            .neighbors(x)
            .iter()
            .map(|&y| {
                if y == SHELL {
                    self.boundary as i64
                } else {
                    self.spins[y as usize] as i64
                }
            })
            .sum()
    }

    /// `beta H(after) - beta H(before)` for flipping the spin at `x`:
    /// `2 J s sum_y s_y + 2 h s + kappa S_x s`.
    pub fn flip_delta(&self, x: usize) -> f64 {
        let ModelParams { j, h, kappa, .. } = self.params;
        let s = self.spins[x] as f64;
        let salt = if self.salt[x] { 1.0 } else { 0.0 };
        2.0 * j * s * self.local_field(x) as f64 + 2.0 * h * s + kappa * salt * s
    }

    /// `beta H(after) - beta H(before)` for moving a salt particle from
    /// `from` to `to`: `kappa [(1 - s_to)/2 - (1 - s_from)/2]`.
    pub fn swap_delta(&self, from: usize, to: usize) -> f64 {
        let cost = |x: usize| if self.spins[x] == 1 { 0.0 } else { 1.0 };
        self.params.kappa * (cost(to) - cost(from))
    }

    fn flip(&mut self, x: usize, delta: f64) {
        let s = self.spins[x];
        self.bonds -= 2 * s as i64 * self.local_field(x);
        self.total_spin -= 2 * s as i64;
        if self.salt[x] {
            if s == 1 {
                self.salt_on_plus -= 1;
            } else {
                self.salt_on_plus += 1;
            }
        }
        self.spins[x] = -s;
        self.energy += delta;
    }

    fn swap(&mut self, from: usize, to: usize, delta: f64) {
        let (i, k) = (self.slot[from] as usize, self.slot[to] as usize);
        self.occupied[i] = to as u32;
        self.empty[k] = from as u32;
        self.slot[to] = i as u32;
        self.slot[from] = k as u32;
        self.salt[from] = false;
        self.salt[to] = true;
        if self.spins[from] == 1 {
            self.salt_on_plus -= 1;
        }
        if self.spins[to] == 1 {
            self.salt_on_plus += 1;
        }
        self.energy += delta;
    }

    /// Metropolis spin flip at `x`. Returns whether the flip was accepted.
    pub fn spin_flip_step<R: Rng + ?Sized>(&mut self, x: usize, rng: &mut R) -> bool {
        let delta = self.flip_delta(x);
        if self.rule.accept(delta, rng) {
            self.flip(x, delta);
            true
        } else {
            false
        }
    }

    /// Metropolis move of the salt particle at `from` to the empty site `to`.
    pub fn salt_swap_step<R: Rng + ?Sized>(
        &mut self,
        from: usize,
        to: usize,
        rng: &mut R,
    ) -> SwapOutcome {
        if from >= self.sites() || to >= self.sites() || !self.salt[from] || self.salt[to] {
            return SwapOutcome::Invalid;
        }
        let delta = self.swap_delta(from, to);
        if self.rule.accept(delta, rng) {
            self.swap(from, to, delta);
            SwapOutcome::Accepted
        } else {
            SwapOutcome::Rejected
        }
    }

    /// Uniform proposal over occupied x empty pairs. `None` when the box is
    /// empty of salt or full.
    pub fn propose_swap<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize)> {
        if self.occupied.is_empty() || self.empty.is_empty() {
            return None;
        }
        let i = rng.gen_range(0..self.occupied.len() as u32) as usize;
        let k = rng.gen_range(0..self.empty.len() as u32) as usize;
        Some((self.occupied[i] as usize, self.empty[k] as usize))
    }
}

/// `floor(c L^d)` distinct sites drawn uniformly without replacement.
pub fn random_salt_sites<R: Rng + ?Sized>(sites: usize, c: f64, rng: &mut R) -> Vec<usize> {
    let count = salt_count(c, sites as u64) as usize;
    let mut pool: Vec<usize> = (0..sites).collect();
    for i in 0..count {
        let k = rng.gen_range(i as u32..sites as u32) as usize;
        pool.swap(i, k);
    }
    pool.truncate(count);
    pool
}
