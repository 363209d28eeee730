use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{random_salt_sites, AcceptanceRule, LatticeState, SwapOutcome};
use super::stats::SampleStats;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Run length and sampling schedule of one Markov chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub params: ModelParams,
    #[serde(rename = "L")]
    pub side: usize,
    pub seed: u64,
    /// Total sweeps, burn-in included. A sweep is `L^d` single-site flip
    /// proposals followed by `L^d` salt swap proposals.
    pub sweeps: u64,
    pub burn_in: u64,
    /// Record every `thinning`-th sweep after burn-in.
    pub thinning: u64,
    #[serde(default, skip_serializing_if = "AcceptanceRule::is_metropolis")]
    pub acceptance: AcceptanceRule,
}

impl ChainConfig {
    /// Default schedule: 20% burn-in, a sample every 10 sweeps.
    pub fn new(params: ModelParams, side: usize, seed: u64, sweeps: u64) -> Self {
        ChainConfig {
            params,
            side,
            seed,
            sweeps,
            burn_in: sweeps / 5,
            thinning: 10,
            acceptance: AcceptanceRule::Metropolis,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.side == 0 {
            return Err(Error::param("L", "L must be at least 1"));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::param("sweeps", "sweeps must exceed burn_in"));
        }
        if self.thinning == 0 {
            return Err(Error::param("thinning", "thinning must be at least 1"));
        }
        Ok(())
    }
}

/// Generator of chain `stream` for `seed`. Chains with different streams are
/// independent and each one is reproducible on its own.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Initial state of chain `stream`: spins at the boundary value, salt placed
/// uniformly at random.
pub fn init_state_with(config: &ChainConfig, rng: &mut ChaCha8Rng) -> Result<LatticeState> {
    config.validate()?;
    let probe = LatticeState::new(&config.params, config.side, &[])?;
    let sites = random_salt_sites(probe.sites(), config.params.c, rng);
    let mut state = LatticeState::new(&config.params, config.side, &sites)?;
    state.set_acceptance(config.acceptance);
    Ok(state)
}

/// Initial state of chain 0.
pub fn init_state(config: &ChainConfig) -> Result<LatticeState> {
    init_state_with(config, &mut chain_rng(config.seed, 0))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCounts {
    pub flips_proposed: u64,
    pub flips_accepted: u64,
    pub swaps_proposed: u64,
    pub swaps_accepted: u64,
    pub swaps_invalid: u64,
}

impl MoveCounts {
    pub fn merge(&mut self, other: &MoveCounts) {
        self.flips_proposed += other.flips_proposed;
        self.flips_accepted += other.flips_accepted;
        self.swaps_proposed += other.swaps_proposed;
        self.swaps_accepted += other.swaps_accepted;
        self.swaps_invalid += other.swaps_invalid;
    }
}

/// One full sweep: `L^d` flips at uniformly chosen sites, then `L^d` salt
/// swaps between uniformly chosen occupied and empty sites.
pub fn sweep(state: &mut LatticeState, rng: &mut ChaCha8Rng, counts: &mut MoveCounts) {
    use rand::Rng;
    let n = state.sites();
    for _ in 0..n {
        let x = rng.gen_range(0..n as u32) as usize;
        counts.flips_proposed += 1;
        if state.spin_flip_step(x, rng) {
            counts.flips_accepted += 1;
        }
    }
    for _ in 0..n {
        let Some((from, to)) = state.propose_swap(rng) else {
            break;
        };
        counts.swaps_proposed += 1;
        match state.salt_swap_step(from, to, rng) {
            SwapOutcome::Accepted => counts.swaps_accepted += 1,
            SwapOutcome::Rejected => {}
            SwapOutcome::Invalid => counts.swaps_invalid += 1,
        }
    }
}

/// Recorded observables of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub sweep: u64,
    #[serde(rename = "M")]
    pub total_spin: i64,
    #[serde(rename = "Q")]
    pub salt_on_plus: u64,
}

/// Samples of one chain with the sizes needed to interpret them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub stream: u64,
    pub sites: u64,
    pub salt: u64,
    pub samples: Vec<Sample>,
    pub moves: MoveCounts,
}

/// Runs chain `stream` of `config` and returns its samples.
pub fn run_trace(config: &ChainConfig, stream: u64) -> Result<Trace> {
    let mut rng = chain_rng(config.seed, stream);
    let mut state = init_state_with(config, &mut rng)?;
    let mut moves = MoveCounts::default();
    let kept = (config.sweeps - config.burn_in) / config.thinning + 1;
    let mut samples = Vec::with_capacity(kept as usize);
    for s in 1..=config.sweeps {
        sweep(&mut state, &mut rng, &mut moves);
        if cfg!(debug_assertions) && s % 1000 == 0 {
            if let Err(e) = state.verify_caches() {
                panic!("cache mismatch after sweep {s}: {e:?}");
            }
        }
        if s > config.burn_in && (s - config.burn_in) % config.thinning == 0 {
            samples.push(Sample {
                sweep: s,
                total_spin: state.total_spin(),
                salt_on_plus: state.salt_on_plus(),
            });
        }
    }
    Ok(Trace {
        stream,
        sites: state.sites() as u64,
        salt: state.salt_count(),
        samples,
        moves,
    })
}

/// Runs chain 0 of `config` and summarizes it.
pub fn run_chain(config: &ChainConfig) -> Result<SampleStats> {
    let trace = run_trace(config, 0)?;
    Ok(SampleStats::from_traces(core::slice::from_ref(&trace)))
}
