//! Equilibrium theory of a solvent/solute lattice model at fixed solute
//! concentration.
//!
//! The solvent is an Ising ferromagnet (`+1` liquid, `-1` ice); solute
//! ("salt") particles sit on sites with hard-core exclusion and pay a penalty
//! `kappa` when they sit on ice. Fixing the number of salt particles turns the
//! flat piece of the Ising free energy into a strictly convex variational
//! problem, which this crate evaluates:
//!
//! * [`params`]: physical parameters and the reduction of the raw
//!   ice/liquid/salt Hamiltonian to Ising form.
//! * [`magnetization`] and [`free_energy`]: pluggable magnetization models and
//!   the canonical Ising free energy built from them.
//! * [`salt`]: Bernoulli entropy, the mixed salt entropy, exact configuration
//!   counts and the inner optimization over the salt split.
//! * [`variational`]: the full variational functional, its minimizer, mole
//!   fractions, phase boundaries and the dilute limit.
//! * [`lattice`]: a fixed-salt-number Metropolis sampler and an exact
//!   enumeration oracle for tiny lattices.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod free_energy;
pub mod lattice;
pub mod magnetization;
pub mod numeric;
pub mod params;
pub mod salt;
pub mod variational;

pub use error::{Error, Result};
pub use free_energy::{free_energy, tabulate, FreeEnergyCurve};
pub use magnetization::{
    mean_field_mag, onsager_spontaneous_m, MagnetizationModel, TabulatedCurve,
};
pub use params::{effective_field, reduce_to_ising, Boundary, ModelParams, RawParams};
pub use salt::{
    bernoulli_entropy, count_salt_configs, log_salt_weight, optimal_theta, xi, SaltSplit,
};
pub use variational::{
    big_g, classify, dilute_check, field_for_m, minimize_g, mole_fractions, phase_boundaries,
    script_g, MoleFractions, PhaseBoundary, Region, VariationalSolution,
};
