use brine_core::lattice::{
    chain_rng, exact_enumerate, init_state_with, joint_frequencies, run_chain, run_trace, sweep,
    total_variation, ChainConfig, MoveCounts, SampleStats,
};
use brine_core::{minimize_g, Boundary, MagnetizationModel, ModelParams, Region};
use proptest::prelude::*;

fn params(j: f64, h: f64, kappa: f64, c: f64) -> ModelParams {
    ModelParams {
        j,
        h,
        kappa,
        c,
        d: 2,
        bc: Boundary::Plus,
    }
}

#[test]
fn salt_is_conserved_and_caches_stay_coherent() {
    let config = ChainConfig::new(params(0.6, -0.03, 1.0, 0.1), 12, 5, 3_000);
    let mut rng = chain_rng(config.seed, 0);
    let mut state = init_state_with(&config, &mut rng).unwrap();
    let salt = state.salt_count();
    assert_eq!(salt, 14);
    let mut moves = MoveCounts::default();
    for s in 1..=config.sweeps {
        sweep(&mut state, &mut rng, &mut moves);
        assert_eq!(state.salt_count(), salt);
        assert!(state.salt_on_plus() <= salt.min(state.plus_count()));
        if s % 100 == 0 {
            state.verify_caches().unwrap();
        }
    }
    assert!(moves.flips_accepted > 0 && moves.swaps_accepted > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_chains_keep_their_invariants(
        j in 0.0..1.0f64, h in -0.5..0.5f64, kappa in 0.0..4.0f64, c in 0.0..0.9f64,
        side in 1usize..7, d in 1u32..=3, minus in any::<bool>(), seed in any::<u64>(),
    ) {
        let bc = if minus { Boundary::Minus } else { Boundary::Plus };
        let p = ModelParams { j, h, kappa, c, d, bc };
        let config = ChainConfig::new(p, side, seed, 50);
        let mut rng = chain_rng(seed, 1);
        let mut state = init_state_with(&config, &mut rng).unwrap();
        let salt = state.salt_count();
        let mut moves = MoveCounts::default();
        for _ in 0..50 {
            sweep(&mut state, &mut rng, &mut moves);
        }
        prop_assert_eq!(state.salt_count(), salt);
        prop_assert_eq!(moves.swaps_invalid, 0);
        prop_assert!(state.verify_caches().is_ok());
    }
}

#[test]
fn identical_configs_give_identical_stats() {
    let config = ChainConfig::new(params(0.5, 0.01, 1.0, 0.2), 8, 77, 4_000);
    let a = run_chain(&config).unwrap();
    let b = run_chain(&config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.mean_m.value.to_bits(), b.mean_m.value.to_bits());
    let c = run_chain(&ChainConfig { seed: 78, ..config }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn free_salt_is_spread_evenly() {
    let config = ChainConfig::new(params(0.3, 0.05, 0.0, 0.2), 16, 3, 6_000);
    let stats = run_chain(&config).unwrap();
    let c = stats.concentration();
    assert!(stats.occ_plus.within(c, 3.0), "{:?} vs {c}", stats.occ_plus);
    assert!(
        stats.occ_minus.within(c, 3.0),
        "{:?} vs {c}",
        stats.occ_minus
    );
    assert!(stats.odds_ratio.within(1.0, 3.0), "{:?}", stats.odds_ratio);
    assert!(stats.mass_residual().abs() <= 1e-12);
}

#[test]
fn strong_field_gives_liquid() {
    let model = MagnetizationModel::onsager(0.6);
    let p = params(0.6, 0.3, 1.0, 0.1);
    assert_eq!(minimize_g(&p, &model).unwrap().region, Region::Liquid);
    let stats = run_chain(&ChainConfig::new(p, 16, 8, 4_000)).unwrap();
    let ms = model.spontaneous_m();
    assert!(
        stats.mean_m.value >= ms - 3.0 * stats.mean_m.stderr,
        "{:?}",
        stats.mean_m
    );
}

#[test]
fn small_box_matches_enumeration_and_detects_a_wrong_field() {
    let p = params(0.4, -0.05, 1.0, 2.0 / 9.0);
    let config = ChainConfig {
        burn_in: 500,
        thinning: 1,
        ..ChainConfig::new(p, 3, 41, 120_000)
    };
    let trace = run_trace(&config, 0).unwrap();
    let empirical = joint_frequencies(std::slice::from_ref(&trace));
    let exact = exact_enumerate(&p, 3).unwrap();
    let tv = total_variation(&empirical, &exact.joint);
    assert!(tv <= 0.015, "{tv}");
    let wrong = exact_enumerate(&params(0.4, 0.1, 1.0, 2.0 / 9.0), 3).unwrap();
    assert!(total_variation(&empirical, &wrong.joint) > 0.05);
    let no_penalty = exact_enumerate(&params(0.4, -0.05, 0.0, 2.0 / 9.0), 3).unwrap();
    assert!(total_variation(&empirical, &no_penalty.joint) > 0.05);

    // the salt marginal of Q alone
    let q_exact: std::collections::BTreeMap<u64, f64> =
        exact
            .joint
            .iter()
            .fold(Default::default(), |mut acc, (&(_, q), &p)| {
                *acc.entry(q).or_default() += p;
                acc
            });
    let q_emp = empirical.iter().fold(
        std::collections::BTreeMap::new(),
        |mut acc, (&(_, q), &p)| {
            *acc.entry(q).or_insert(0.0) += p;
            acc
        },
    );
    assert!(total_variation(&q_emp, &q_exact) <= 0.01);
}

#[test]
fn salt_in_a_window_is_uncorrelated_given_spins() {
    // all-plus 2x2 window at the centre of a 32x32 box
    let side = 32;
    let config = ChainConfig::new(params(0.6, 0.2, 1.0, 0.1), side, 12, 12_500);
    let window = [
        16 * side + 16,
        16 * side + 17,
        17 * side + 16,
        17 * side + 17,
    ];
    let mut rng = chain_rng(config.seed, 0);
    let mut state = init_state_with(&config, &mut rng).unwrap();
    let mut moves = MoveCounts::default();
    for _ in 0..500 {
        sweep(&mut state, &mut rng, &mut moves);
    }
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for _ in 0..12_000 {
        sweep(&mut state, &mut rng, &mut moves);
        if window.iter().all(|&x| state.spins()[x] == 1) {
            rows.push(window.map(|x| if state.salt()[x] { 1.0 } else { 0.0 }));
        }
    }
    assert!(rows.len() > 10_000);
    let blocks = 32;
    let per = rows.len() / blocks;
    for a in 0..4 {
        for b in a + 1..4 {
            let cov = |chunk: &[[f64; 4]]| {
                let n = chunk.len() as f64;
                let (ma, mb) = (
                    chunk.iter().map(|r| r[a]).sum::<f64>() / n,
                    chunk.iter().map(|r| r[b]).sum::<f64>() / n,
                );
                chunk.iter().map(|r| (r[a] - ma) * (r[b] - mb)).sum::<f64>() / n
            };
            let per_block: Vec<f64> = rows.chunks(per).take(blocks).map(cov).collect();
            let mean = per_block.iter().sum::<f64>() / blocks as f64;
            let var = per_block
                .iter()
                .map(|v| (v - mean) * (v - mean))
                .sum::<f64>()
                / (blocks - 1) as f64;
            let stderr = (var / blocks as f64).sqrt();
            assert!(
                mean.abs() <= 3.0 * stderr,
                "sites {a},{b}: cov {mean} +- {stderr}"
            );
        }
    }
}

#[test]
fn magnetization_concentrates_with_size() {
    let p = params(0.6, 0.1, 1.0, 0.1);
    let variance = |side: usize| {
        let config = ChainConfig::new(p, side, 4, 5_000);
        let traces: Vec<_> = (0..2).map(|k| run_trace(&config, k).unwrap()).collect();
        SampleStats::from_traces(&traces).variance_m()
    };
    let (small, large) = (variance(16), variance(32));
    assert!(large < small, "{large} !< {small}");
}

#[test]
fn tails_shrink_with_size() {
    let p = params(0.6, 0.1, 1.0, 0.1);
    let tails = |side: usize| {
        let stats = run_chain(&ChainConfig::new(p, side, 9, 3_000)).unwrap();
        (stats.tail_m(0.01), stats.tail_q(0.01))
    };
    let (m8, _) = tails(8);
    let (m24, q24) = tails(24);
    assert!(m24 < m8);
    assert!((0.0..=1.0).contains(&q24));
}
