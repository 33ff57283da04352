//! Ordering rules for a block of pending trades.

mod brute_force;
mod greedy;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amm::{indices_by_id, Ordering, Pool, Trade};
use crate::error::{ClvrError, Result};

pub use brute_force::{
    brute_force, enumerate_orderings, metric_range, Leaf, Metric, Objective, DEFAULT_FACTORIAL_CAP,
};
pub use greedy::{clvr, clvr_slippage_aware, gsr, vhgsr, vhgsr_slippage_aware, SlippageOrdering};

/// Uniform permutation of `trades`, reproducible from `seed`.
pub fn random_ordering(trades: &[Trade], seed: u64) -> Ordering {
    let mut idx = indices_by_id(trades);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    Ordering::from_indices(trades, &idx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequencerKind {
    /// Execute in arrival (input) order.
    Fcfs,
    Random { seed: u64 },
    BruteForceMin(Metric),
    BruteForceMax(Metric),
    Gsr,
    Vhgsr,
    Clvr,
    ClvrSlippageAware,
    VhgsrSlippageAware,
}

impl SequencerKind {
    pub fn order(&self, pool: &Pool, trades: &[Trade]) -> Result<Ordering> {
        self.order_with_cap(pool, trades, DEFAULT_FACTORIAL_CAP)
    }

    pub fn order_with_cap(&self, pool: &Pool, trades: &[Trade], cap: usize) -> Result<Ordering> {
        match *self {
            SequencerKind::Fcfs => Ok(Ordering::identity(trades)),
            SequencerKind::Random { seed } => Ok(random_ordering(trades, seed)),
            SequencerKind::BruteForceMin(_) | SequencerKind::BruteForceMax(_) if trades.is_empty() => {
                Ok(Ordering::default())
            }
            SequencerKind::BruteForceMin(m) => Ok(brute_force(pool, trades, m, Objective::Min, cap)?.0),
            SequencerKind::BruteForceMax(m) => Ok(brute_force(pool, trades, m, Objective::Max, cap)?.0),
            SequencerKind::Gsr => gsr(pool, trades),
            SequencerKind::Vhgsr => vhgsr(pool, trades),
            SequencerKind::Clvr => clvr(pool, trades),
            SequencerKind::ClvrSlippageAware => Ok(clvr_slippage_aware(pool, trades)?.ordering),
            SequencerKind::VhgsrSlippageAware => Ok(vhgsr_slippage_aware(pool, trades)?.ordering),
        }
    }

    /// Same rule with its random seed (if any) replaced.
    pub fn reseeded(self, seed: u64) -> Self {
        match self {
            SequencerKind::Random { .. } => SequencerKind::Random { seed },
            other => other,
        }
    }

    pub fn is_brute_force(&self) -> bool {
        matches!(self, SequencerKind::BruteForceMin(_) | SequencerKind::BruteForceMax(_))
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SequencerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let metric = |m: &Metric| match m {
            Metric::Volatility => "",
            Metric::Gini => "-gini",
        };
        match self {
            SequencerKind::Fcfs => f.write_str("fcfs"),
            SequencerKind::Random { .. } => f.write_str("random"),
            SequencerKind::BruteForceMin(m) => write!(f, "brute-force-min{}", metric(m)),
            SequencerKind::BruteForceMax(m) => write!(f, "brute-force-max{}", metric(m)),
            SequencerKind::Gsr => f.write_str("gsr"),
            SequencerKind::Vhgsr => f.write_str("vhgsr"),
            SequencerKind::Clvr => f.write_str("clvr"),
            SequencerKind::ClvrSlippageAware => f.write_str("clvr-slippage"),
            SequencerKind::VhgsrSlippageAware => f.write_str("vhgsr-slippage"),
        }
    }
}

impl FromStr for SequencerKind {
    type Err = ClvrError;

    /// Accepts the names produced by `Display`; `random` takes seed 0 and
    /// `random:<seed>` an explicit one.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        if let Some(seed) = norm.strip_prefix("random:") {
            let seed = seed
                .parse()
                .map_err(|_| ClvrError::InvalidConfig(format!("bad random seed in `{s}`")))?;
            return Ok(SequencerKind::Random { seed });
        }
        Ok(match norm.as_str() {
            "fcfs" | "identity" | "current" => SequencerKind::Fcfs,
            "random" => SequencerKind::Random { seed: 0 },
            "brute-force-min" | "bf-min" | "optimal" => SequencerKind::BruteForceMin(Metric::Volatility),
            "brute-force-max" | "bf-max" => SequencerKind::BruteForceMax(Metric::Volatility),
            "brute-force-min-gini" => SequencerKind::BruteForceMin(Metric::Gini),
            "brute-force-max-gini" => SequencerKind::BruteForceMax(Metric::Gini),
            "gsr" => SequencerKind::Gsr,
            "vhgsr" => SequencerKind::Vhgsr,
            "clvr" => SequencerKind::Clvr,
            "clvr-slippage" | "clvr-slippage-aware" => SequencerKind::ClvrSlippageAware,
            "vhgsr-slippage" | "vhgsr-slippage-aware" => SequencerKind::VhgsrSlippageAware,
            _ => return Err(ClvrError::InvalidConfig(format!("unknown sequencer `{s}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_deterministic_and_total() {
        let trades: Vec<Trade> = (0..8).map(|i| Trade::sell(i, 1.0).unwrap()).collect();
        let a = random_ordering(&trades, 42);
        assert_eq!(a, random_ordering(&trades, 42));
        assert!(a.to_indices(&trades).is_ok());
        let one = vec![Trade::buy(5, 1.0).unwrap()];
        assert_eq!(random_ordering(&one, 7), Ordering::identity(&one));
    }

    #[test]
    fn random_is_uniform_over_three() {
        let trades: Vec<Trade> = (0..3).map(|i| Trade::sell(i, 1.0).unwrap()).collect();
        let mut counts = std::collections::HashMap::new();
        let draws = 10_000;
        for seed in 0..draws {
            *counts.entry(random_ordering(&trades, seed)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let chi2: f64 = counts
            .values()
            .map(|&c| {
                let e = draws as f64 / 6.0;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        for &c in counts.values() {
            assert!((c as f64 / draws as f64 - 1.0 / 6.0).abs() < 0.02);
        }
        // 5 dof, p = 0.001 critical value
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn names_round_trip() {
        for k in [
            SequencerKind::Fcfs,
            SequencerKind::BruteForceMin(Metric::Volatility),
            SequencerKind::BruteForceMax(Metric::Gini),
            SequencerKind::Gsr,
            SequencerKind::Vhgsr,
            SequencerKind::Clvr,
            SequencerKind::ClvrSlippageAware,
            SequencerKind::VhgsrSlippageAware,
        ] {
            assert_eq!(k.to_string().parse::<SequencerKind>().unwrap(), k);
        }
        assert_eq!("random:9".parse::<SequencerKind>().unwrap(), SequencerKind::Random { seed: 9 });
        assert!("nope".parse::<SequencerKind>().is_err());
    }
}
