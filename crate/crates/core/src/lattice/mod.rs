//! Markov chain Monte Carlo for the spin+salt Gibbs measure at fixed salt
//! number, and exact enumeration of tiny boxes.
//!
//! The box `{0..L}^d` is surrounded by a frozen shell of boundary spins and
//! carries no salt outside. Spins move by single-site Metropolis flips; salt
//! moves by Metropolis swaps between a uniformly chosen occupied site and a
//! uniformly chosen empty site anywhere in the box, which keeps `N` fixed.

mod chain;
mod enumerate;
mod state;
mod stats;

pub use chain::{
    chain_rng, init_state, init_state_with, run_chain, run_trace, sweep, ChainConfig, MoveCounts,
    Sample, Trace,
};
pub use enumerate::{exact_enumerate, state_count, ExactDistribution, STATE_CAP};
pub use state::{
    random_salt_sites, AcceptanceRule, CacheMismatch, Lattice, LatticeState, SwapOutcome, SHELL,
};
pub use stats::{
    joint_frequencies, total_variation, Estimate, SampleStats, MIN_BLOCK, TARGET_BLOCKS,
};
