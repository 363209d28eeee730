use brine_core::lattice::{run_trace, ChainConfig, SampleStats};
use rayon::prelude::*;

use super::default_params;
use crate::cli::SimulateArgs;
use crate::formats::{json, records_csv};
use crate::settings::Settings;
use crate::{CliError, Output};

pub fn run(args: &SimulateArgs, settings: &mut Settings) -> Result<Output, CliError> {
    let params = settings.params(&args.physics, default_params())?;
    let side = settings.get("L", args.chain.side, 16usize)?;
    let seed = settings.get("seed", args.chain.seed, 1u64)?;
    let sweeps = settings.get("sweeps", args.sweeps, 10_000u64)?;
    let burn_in = settings.get("burn_in", args.burn_in, sweeps / 5)?;
    let thinning = settings.get("thin", args.thin, 10u64)?;
    let chains = settings.get("chains", args.chains, 4u64)?;
    let write_samples = settings.get("samples", args.samples.then_some(true), false)?;
    if chains == 0 {
        return Err(CliError::Config("chains must be positive".into()));
    }
    let config = ChainConfig {
        burn_in,
        thinning,
        ..ChainConfig::new(params, side, seed, sweeps)
    };
    config.validate()?;

    let traces = (0..chains)
        .into_par_iter()
        .map(|k| run_trace(&config, k))
        .collect::<Result<Vec<_>, _>>()?;
    let stats = SampleStats::from_traces(&traces);
    let doc = json(&stats)?;
    let mut files = vec![("stats.json".to_string(), doc.clone())];
    if write_samples {
        for trace in &traces {
            files.push((
                format!("samples-{}.csv", trace.stream),
                records_csv(&trace.samples)?,
            ));
        }
    }
    Ok(Output {
        stdout: String::from_utf8_lossy(&doc).into_owned(),
        files,
        seeds: vec![seed],
        failed: false,
    })
}
