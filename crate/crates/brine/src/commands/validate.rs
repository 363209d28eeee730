use std::collections::BTreeMap;

use brine_core::lattice::{
    exact_enumerate, joint_frequencies, run_trace, total_variation, AcceptanceRule, ChainConfig,
    SampleStats,
};
use brine_core::{mole_fractions, optimal_theta, Error, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::ValidateArgs;
use crate::formats::json;
use crate::settings::Settings;
use crate::{CliError, Output};

const BURN_IN: u64 = 1_000;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    value: f64,
    limit: f64,
}

impl Check {
    fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        Check {
            name,
            passed: value <= limit,
            value,
            limit,
        }
    }
}

#[derive(Debug, Serialize)]
struct Cell {
    #[serde(rename = "M")]
    total_spin: i64,
    #[serde(rename = "Q")]
    salt_on_plus: u64,
    exact: f64,
    sampled: f64,
}

#[derive(Debug, Serialize)]
struct TvReport {
    total_variation: f64,
    tolerance: f64,
    proposals: u64,
    /// Cells of the `(M, Q)` law with the largest discrepancy.
    worst_cells: Vec<Cell>,
}

#[derive(Debug, Serialize)]
struct Report {
    passed: bool,
    #[serde(rename = "L")]
    side: usize,
    sites: usize,
    salt: u64,
    acceptance: AcceptanceRule,
    checks: Vec<Check>,
    tv_report: TvReport,
    odds_ratio: brine_core::lattice::Estimate,
}

pub fn run(args: &ValidateArgs, settings: &mut Settings) -> Result<Output, CliError> {
    let defaults = ModelParams {
        j: 0.4,
        h: -0.05,
        kappa: 1.0,
        c: 2.0 / 9.0,
        ..super::default_params()
    };
    let params = settings.params(&args.physics, defaults)?;
    let side = settings.get("L", args.chain.side, 3usize)?;
    let seed = settings.get("seed", args.chain.seed, 2024u64)?;
    let proposals = settings.get("proposals", args.proposals, 10_000_000u64)?;
    let chains = settings.get("chains", args.chains, 4u64)?;
    let tv_tol = settings.get("tv_tol", args.tv_tol, 0.01)?;
    let acceptance = match settings.opt("perturb_acceptance", args.perturb_acceptance)? {
        Some(s) => AcceptanceRule::Tempered(s),
        None => AcceptanceRule::Metropolis,
    };
    if chains == 0 {
        return Err(CliError::Config("chains must be positive".into()));
    }

    let exact = exact_enumerate(&params, side)?;
    let target = params.kappa.exp();
    let mut checks = vec![
        Check::at_most(
            "salt_weight_depends_on_q_only",
            exact.salt_weight_spread,
            0.0,
        ),
        Check::at_most(
            "spin_law_is_ising_mixture",
            exact.conditional_deviation(),
            1e-12,
        ),
        Check::at_most(
            "exact_pooled_odds",
            (exact.pooled_odds() / target - 1.0).abs(),
            1e-12,
        ),
        Check::at_most(
            "mole_fractions_match_split",
            split_mismatch(params.c, params.kappa)?,
            1e-9,
        ),
    ];

    let per_sweep = 2 * exact.sites as u64;
    let sweeps = proposals.div_ceil(per_sweep * chains) + BURN_IN;
    let config = ChainConfig {
        params,
        side,
        seed,
        sweeps,
        burn_in: BURN_IN,
        thinning: 1,
        acceptance,
    };
    config.validate()?;
    let traces = (0..chains)
        .into_par_iter()
        .map(|k| run_trace(&config, k))
        .collect::<Result<Vec<_>, _>>()?;
    let sampled = joint_frequencies(&traces);
    let tv = total_variation(&sampled, &exact.joint);
    let stats = SampleStats::from_traces(&traces);
    let odds = stats.odds_ratio;

    checks.push(Check::at_most("mc_total_variation", tv, tv_tol));
    checks.push(Check::at_most(
        "mc_odds_ratio_sigmas",
        (odds.value - target).abs() / odds.stderr,
        3.0,
    ));
    checks.push(Check::at_most(
        "mc_mass_balance",
        stats.mass_residual().abs(),
        1e-12,
    ));

    let report = Report {
        passed: checks.iter().all(|c| c.passed),
        side,
        sites: exact.sites,
        salt: exact.salt,
        acceptance,
        checks,
        tv_report: TvReport {
            total_variation: tv,
            tolerance: tv_tol,
            proposals: stats.moves.flips_proposed + stats.moves.swaps_proposed,
            worst_cells: worst_cells(&exact.joint, &sampled, 5),
        },
        odds_ratio: odds,
    };
    let doc = json(&report)?;
    Ok(Output {
        stdout: String::from_utf8_lossy(&doc).into_owned(),
        files: vec![("validate.json".into(), doc)],
        seeds: vec![seed],
        failed: !report.passed,
    })
}

/// Largest gap between the mole fractions and the optimal-split occupations
/// over a grid of feasible magnetizations.
fn split_mismatch(c: f64, kappa: f64) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for k in -19..=19 {
        let m = k as f64 / 20.0;
        let split = match optimal_theta(m, c, kappa) {
            Ok(s) => s,
            Err(Error::Infeasible { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let q = mole_fractions(m, c, kappa)?;
        worst = worst
            .max((q.q_plus - split.p_plus).abs())
            .max((q.q_minus - split.p_minus).abs());
    }
    Ok(worst)
}

fn worst_cells(
    exact: &BTreeMap<(i64, u64), f64>,
    sampled: &BTreeMap<(i64, u64), f64>,
    count: usize,
) -> Vec<Cell> {
    let mut keys: Vec<_> = exact.keys().chain(sampled.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut cells: Vec<Cell> = keys
        .into_iter()
        .map(|(m, q)| Cell {
            total_spin: m,
            salt_on_plus: q,
            exact: exact.get(&(m, q)).copied().unwrap_or(0.0),
            sampled: sampled.get(&(m, q)).copied().unwrap_or(0.0),
        })
        .collect();
    cells.sort_by(|a, b| {
        (b.exact - b.sampled)
            .abs()
            .total_cmp(&(a.exact - a.sampled).abs())
    });
    cells.truncate(count);
    cells
}
