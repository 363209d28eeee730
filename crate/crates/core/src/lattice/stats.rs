use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;
use serde::{Deserialize, Serialize};

use super::chain::{MoveCounts, Trace};

/// Smallest block used for error bars.
pub const MIN_BLOCK: usize = 64;
/// Target number of blocks when samples are plentiful.
pub const TARGET_BLOCKS: usize = 32;

/// A point estimate with its blocked jackknife standard error (`NaN` when
/// fewer than two blocks are available).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `|value - target| <= k stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

// Per-sample sums. With a = Q, b = n+ - Q, c = N - Q, d = n- - N + Q:
// [count, M/n, Q/n, n+/n, a d, b c]
const STATS: usize = 6;
type Sums = [f64; STATS];

fn add(acc: &mut Sums, x: &Sums) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

fn sub(a: &Sums, b: &Sums) -> Sums {
    let mut out = *a;
    for (o, v) in out.iter_mut().zip(b) {
        *o -= v;
    }
    out
}

/// Summary of one or more chains on the same lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub chains: u64,
    pub samples: u64,
    pub sites: u64,
    pub salt: u64,
    /// Magnetization density `M / L^d`.
    pub mean_m: Estimate,
    /// `Q / L^d`.
    pub mean_q: Estimate,
    /// Fraction of plus spins.
    pub plus_fraction: Estimate,
    /// Salt frequency on plus spins, `<Q> / <n+>`.
    pub occ_plus: Estimate,
    /// Salt frequency on minus spins, `<N - Q> / <n->`.
    pub occ_minus: Estimate,
    /// Pooled (Mantel-Haenszel) odds ratio of salt on plus against minus
    /// spins, `sum Q (n- - N + Q) / sum (n+ - Q)(N - Q)`. Its expectation is
    /// exactly `e^kappa` at every lattice size.
    pub odds_ratio: Estimate,
    /// Counts of `M`; bin `k` holds `M = 2k - L^d`.
    pub hist_m: Vec<u64>,
    /// Counts of `Q`; bin `k` holds `Q = k`.
    pub hist_q: Vec<u64>,
    pub moves: MoveCounts,
}

impl SampleStats {
    /// Pools the traces in order. All traces must come from the same lattice.
    pub fn from_traces(traces: &[Trace]) -> SampleStats {
        let (sites, salt) = traces.first().map(|t| (t.sites, t.salt)).unwrap_or((0, 0));
        assert!(
            traces.iter().all(|t| t.sites == sites && t.salt == salt),
            "traces from different lattices"
        );
        let total: usize = traces.iter().map(|t| t.samples.len()).sum();
        let block = MIN_BLOCK.max(total.div_ceil(TARGET_BLOCKS));
        let n = sites as f64;
        let mut blocks: Vec<Sums> = Vec::new();
        let mut hist_m = vec![0u64; sites as usize + 1];
        let mut hist_q = vec![0u64; salt as usize + 1];
        let mut moves = MoveCounts::default();
        for trace in traces {
            moves.merge(&trace.moves);
            let chunks = (trace.samples.len() / block).max(1);
            let first = blocks.len();
            blocks.resize(first + chunks.min(trace.samples.len()), [0.0; STATS]);
            for (i, s) in trace.samples.iter().enumerate() {
                let plus = (sites as i64 + s.total_spin) / 2;
                let (a, c) = (s.salt_on_plus as f64, (salt - s.salt_on_plus) as f64);
                let (b, d) = (plus as f64 - a, (sites as i64 - plus) as f64 - c);
                let row = [
                    1.0,
                    s.total_spin as f64 / n,
                    a / n,
                    plus as f64 / n,
                    a * d,
                    b * c,
                ];
                add(&mut blocks[first + (i / block).min(chunks - 1)], &row);
                hist_m[plus as usize] += 1;
                hist_q[s.salt_on_plus as usize] += 1;
            }
        }
        let mut grand = [0.0; STATS];
        for b in &blocks {
            add(&mut grand, b);
        }
        let estimate = |f: &dyn Fn(&Sums) -> f64| jackknife(&grand, &blocks, f);
        let salt_density = salt as f64 / n;
        SampleStats {
            chains: traces.len() as u64,
            samples: total as u64,
            sites,
            salt,
            mean_m: estimate(&|s| s[1] / s[0]),
            mean_q: estimate(&|s| s[2] / s[0]),
            plus_fraction: estimate(&|s| s[3] / s[0]),
            occ_plus: estimate(&|s| s[2] / s[3]),
            occ_minus: estimate(&|s| (salt_density * s[0] - s[2]) / (s[0] - s[3])),
            odds_ratio: estimate(&|s| s[4] / s[5]),
            hist_m,
            hist_q,
            moves,
        }
    }

    /// Realized concentration `N / L^d`.
    pub fn concentration(&self) -> f64 {
        self.salt as f64 / self.sites as f64
    }

    /// `occ_plus * plus_fraction + occ_minus * (1 - plus_fraction) - N / L^d`,
    /// zero up to rounding.
    pub fn mass_residual(&self) -> f64 {
        let f = self.plus_fraction.value;
        self.occ_plus.value * f + self.occ_minus.value * (1.0 - f) - self.concentration()
    }

    /// Sample variance of `M / L^d` from the histogram.
    pub fn variance_m(&self) -> f64 {
        let n = self.sites as f64;
        let values = self
            .hist_m
            .iter()
            .enumerate()
            .map(|(k, &w)| ((2 * k) as f64 / n - 1.0, w));
        weighted_variance(values)
    }

    /// Fraction of samples with `|M / L^d - mean| > eps`.
    pub fn tail_m(&self, eps: f64) -> f64 {
        let n = self.sites as f64;
        let mean = self.mean_m.value;
        tail(
            self.hist_m
                .iter()
                .enumerate()
                .map(|(k, &w)| ((2 * k) as f64 / n - 1.0, w)),
            mean,
            eps,
        )
    }

    /// Fraction of samples with `|Q / L^d - mean| > eps`.
    pub fn tail_q(&self, eps: f64) -> f64 {
        let n = self.sites as f64;
        let mean = self.mean_q.value;
        tail(
            self.hist_q
                .iter()
                .enumerate()
                .map(|(k, &w)| (k as f64 / n, w)),
            mean,
            eps,
        )
    }
}

fn jackknife(grand: &Sums, blocks: &[Sums], f: &dyn Fn(&Sums) -> f64) -> Estimate {
    let value = f(grand);
    let b = blocks.len();
    if b < 2 {
        return Estimate {
            value,
            stderr: f64::NAN,
        };
    }
    let leave_out: Vec<f64> = blocks.iter().map(|blk| f(&sub(grand, blk))).collect();
    let mean = leave_out.iter().sum::<f64>() / b as f64;
    let ss: f64 = leave_out.iter().map(|v| (v - mean) * (v - mean)).sum();
    Estimate {
        value,
        stderr: sqrt(ss * (b - 1) as f64 / b as f64),
    }
}

fn weighted_variance(values: impl Iterator<Item = (f64, u64)> + Clone) -> f64 {
    let count: u64 = values.clone().map(|(_, w)| w).sum();
    if count < 2 {
        return 0.0;
    }
    let mean = values.clone().map(|(x, w)| x * w as f64).sum::<f64>() / count as f64;
    values
        .map(|(x, w)| (x - mean) * (x - mean) * w as f64)
        .sum::<f64>()
        / (count - 1) as f64
}

fn tail(values: impl Iterator<Item = (f64, u64)>, mean: f64, eps: f64) -> f64 {
    let (mut hit, mut all) = (0u64, 0u64);
    for (x, w) in values {
        all += w;
        if (x - mean).abs() > eps {
            hit += w;
        }
    }
    if all == 0 {
        0.0
    } else {
        hit as f64 / all as f64
    }
}

/// Empirical joint law of `(M, Q)` pooled over traces.
pub fn joint_frequencies(traces: &[Trace]) -> BTreeMap<(i64, u64), f64> {
    let mut counts: BTreeMap<(i64, u64), u64> = BTreeMap::new();
    let mut total = 0u64;
    for s in traces.iter().flat_map(|t| &t.samples) {
        *counts.entry((s.total_spin, s.salt_on_plus)).or_default() += 1;
        total += 1;
    }
    counts
        .into_iter()
        .map(|(k, v)| (k, v as f64 / total as f64))
        .collect()
}

/// `½ sum |p - q|` over the union of the supports.
pub fn total_variation<K: Ord + Copy>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let mut keys: Vec<K> = p.keys().chain(q.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::chain::Sample;

    fn trace(samples: &[(i64, u64)], sites: u64, salt: u64) -> Trace {
        Trace {
            stream: 0,
            sites,
            salt,
            samples: samples
                .iter()
                .enumerate()
                .map(|(i, &(m, q))| Sample {
                    sweep: i as u64,
                    total_spin: m,
                    salt_on_plus: q,
                })
                .collect(),
            moves: MoveCounts::default(),
        }
    }

    #[test]
    fn single_block_has_no_error_bar() {
        let s = SampleStats::from_traces(&[trace(&[(2, 1), (0, 2)], 4, 2)]);
        assert_eq!(s.mean_m.value, 0.25);
        assert!(s.mean_m.stderr.is_nan());
        assert_eq!(s.hist_m, [0, 0, 1, 1, 0]);
        assert_eq!(s.hist_q, [0, 1, 1]);
        assert!(s.mass_residual().abs() < 1e-15);
    }

    #[test]
    fn constant_samples_have_zero_error() {
        let rows: Vec<(i64, u64)> = (0..640).map(|_| (4, 3)).collect();
        let s = SampleStats::from_traces(&[trace(&rows, 16, 4)]);
        assert_eq!(s.mean_m.stderr, 0.0);
        assert_eq!(s.occ_plus.value, 0.3);
        assert_eq!(s.occ_minus.value, 1.0 / 6.0);
        // a d / b c = 3 * 5 / (7 * 1)
        assert!((s.odds_ratio.value - 15.0 / 7.0).abs() < 1e-15);
        assert_eq!(s.variance_m(), 0.0);
        assert_eq!(s.tail_m(0.01), 0.0);
    }

    #[test]
    fn blocks_respect_chain_boundaries() {
        let a: Vec<(i64, u64)> = (0..200).map(|_| (2, 1)).collect();
        let b: Vec<(i64, u64)> = (0..200).map(|_| (-2, 0)).collect();
        let s = SampleStats::from_traces(&[trace(&a, 4, 1), trace(&b, 4, 1)]);
        assert_eq!(s.samples, 400);
        assert_eq!(s.mean_m.value, 0.0);
        assert!(s.mean_m.stderr > 0.1);
    }

    #[test]
    fn tv_distance() {
        let p: BTreeMap<u8, f64> = [(0, 0.5), (1, 0.5)].into();
        let q: BTreeMap<u8, f64> = [(1, 0.25), (2, 0.75)].into();
        assert!((total_variation(&p, &q) - 0.75).abs() < 1e-15);
        assert_eq!(total_variation(&p, &p), 0.0);
    }
}
