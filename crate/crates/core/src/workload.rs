//! Synthetic pending-trade sets, slippage bounds and trade splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::amm::{execute_trade, Direction, Pool, Trade, TradeId};
use crate::error::{ClvrError, Result};

/// Log-normal size parameters fitted to a month of stablecoin swaps.
pub const DEFAULT_LOG_MU: f64 = 4.93;
pub const DEFAULT_LOG_SIGMA: f64 = 2.05;
/// Reserves of each token in the default synthetic pool.
pub const DEFAULT_RESERVES: f64 = 2_000_000.0;
pub const DEFAULT_SLIPPAGE_TOLERANCE: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SizeDistribution {
    /// `exp(mu + sigma·z)` with `z` standard normal.
    LogNormal { mu: f64, sigma: f64 },
    /// Uniform on the open interval `(lo, hi)`.
    Uniform { lo: f64, hi: f64 },
}

impl SizeDistribution {
    pub fn standard() -> Self {
        SizeDistribution::LogNormal {
            mu: DEFAULT_LOG_MU,
            sigma: DEFAULT_LOG_SIGMA,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            SizeDistribution::LogNormal { mu, sigma } if mu.is_finite() && sigma > 0.0 && sigma.is_finite() => Ok(()),
            SizeDistribution::Uniform { lo, hi } if lo >= 0.0 && hi > lo && hi.is_finite() => Ok(()),
            other => Err(ClvrError::InvalidConfig(format!("invalid size distribution {other:?}"))),
        }
    }

    /// Draws one positive size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SizeDistribution::LogNormal { mu, sigma } => LogNormal::new(mu, sigma)
                .expect("validated parameters")
                .sample(rng),
            SizeDistribution::Uniform { lo, hi } => loop {
                let v = rng.random_range(lo..hi);
                if v > lo {
                    break v;
                }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub n: usize,
    pub size_distribution: SizeDistribution,
    pub buy_probability: f64,
    pub seed: u64,
    pub split_factor: usize,
}

impl WorkloadSpec {
    /// `n` trades, 50/50 directions, default log-normal sizes, no splitting.
    pub fn standard(n: usize, seed: u64) -> Self {
        WorkloadSpec {
            n,
            size_distribution: SizeDistribution::standard(),
            buy_probability: 0.5,
            seed,
            split_factor: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.size_distribution.validate()?;
        if !(0.0..=1.0).contains(&self.buy_probability) {
            return Err(ClvrError::InvalidConfig(format!(
                "buy probability must lie in [0, 1], got {}",
                self.buy_probability
            )));
        }
        if self.split_factor == 0 {
            return Err(ClvrError::InvalidConfig("split factor must be at least 1".into()));
        }
        Ok(())
    }

    /// [`generate_block`] followed by splitting every trade `split_factor` ways.
    pub fn generate(&self) -> Result<Vec<Trade>> {
        let block = generate_block(self)?;
        Ok(split_trades(&block, self.split_factor, SplitTarget::All))
    }
}

/// `spec.n` trades with ids `0..n`, deterministic in `spec.seed`.
/// Ignores `split_factor`; see [`WorkloadSpec::generate`].
pub fn generate_block(spec: &WorkloadSpec) -> Result<Vec<Trade>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.n as u64)
        .map(|id| {
            let direction = if rng.random_bool(spec.buy_probability) {
                Direction::BuyY
            } else {
                Direction::SellX
            };
            let amount = spec.size_distribution.sample(&mut rng);
            Trade::new(id, direction, amount)
        })
        .collect()
}

/// Sets each trade's `min_amount_out` to `(1 - tolerance)` times what it
/// would receive executing alone against `pool`.
pub fn assign_slippage(pool: &Pool, trades: &[Trade], tolerance: f64) -> Result<Vec<Trade>> {
    if !(0.0..=1.0).contains(&tolerance) {
        return Err(ClvrError::InvalidConfig(format!(
            "slippage tolerance must lie in [0, 1], got {tolerance}"
        )));
    }
    trades
        .iter()
        .map(|t| {
            let (_, isolated) = execute_trade(pool, t)?;
            let mut t = t.clone();
            t.min_amount_out = Some((1.0 - tolerance) * isolated);
            Ok(t)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTarget {
    All,
    One(TradeId),
}

/// Replaces each targeted trade of size `s` by `split_factor` trades of size
/// `s / split_factor`.
///
/// Every child carries the parent's owner label (the parent id if it had
/// none). The first child keeps the parent id; the others take fresh ids
/// above the block's current maximum, assigned in input order.
pub fn split_trades(trades: &[Trade], split_factor: usize, target: SplitTarget) -> Vec<Trade> {
    if split_factor <= 1 {
        return trades.to_vec();
    }
    let mut next_id = trades.iter().map(|t| t.id.0).max().map_or(0, |m| m + 1);
    let mut out = Vec::with_capacity(trades.len() * split_factor);
    for t in trades {
        let targeted = match target {
            SplitTarget::All => true,
            SplitTarget::One(id) => t.id == id,
        };
        if !targeted {
            out.push(t.clone());
            continue;
        }
        let part = t.amount_in / split_factor as f64;
        let owner = t.owner_or_id();
        for k in 0..split_factor {
            let id = if k == 0 {
                t.id
            } else {
                next_id += 1;
                TradeId(next_id - 1)
            };
            out.push(Trade {
                id,
                direction: t.direction,
                amount_in: part,
                min_amount_out: t.min_amount_out.map(|m| m / split_factor as f64),
                owner: Some(owner),
            });
        }
    }
    out
}

/// Mixes a base seed with a path of counters (block size, trial, lane...)
/// into an independent 64-bit seed, SplitMix64-style.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(base), |acc, &c| {
        mix(acc.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(mix(c)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_deterministic() {
        assert!(generate_block(&WorkloadSpec::standard(0, 1)).unwrap().is_empty());
        let spec = WorkloadSpec::standard(25, 99);
        assert_eq!(generate_block(&spec).unwrap(), generate_block(&spec).unwrap());
        assert_ne!(generate_block(&spec).unwrap(), generate_block(&spec.with_seed(100)).unwrap());
    }

    #[test]
    fn directions_follow_buy_probability() {
        let mut spec = WorkloadSpec::standard(200, 3);
        spec.buy_probability = 1.0;
        assert!(generate_block(&spec).unwrap().iter().all(|t| t.direction == Direction::BuyY));
        spec.buy_probability = 0.0;
        assert!(generate_block(&spec).unwrap().iter().all(|t| t.direction == Direction::SellX));
    }

    #[test]
    fn uniform_sizes_stay_inside() {
        let mut spec = WorkloadSpec::standard(1000, 5);
        spec.size_distribution = SizeDistribution::Uniform { lo: 0.0, hi: 100_000.0 };
        for t in generate_block(&spec).unwrap() {
            assert!(t.amount_in > 0.0 && t.amount_in < 100_000.0);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = WorkloadSpec::standard(3, 0);
        spec.split_factor = 0;
        assert!(spec.validate().is_err());
        spec = WorkloadSpec::standard(3, 0);
        spec.size_distribution = SizeDistribution::LogNormal { mu: 0.0, sigma: 0.0 };
        assert!(generate_block(&spec).is_err());
        spec = WorkloadSpec::standard(3, 0);
        spec.buy_probability = 1.5;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn slippage_from_isolated_execution() {
        let pool = Pool::new(100.0, 100.0).unwrap();
        let trades = vec![Trade::sell(0, 10.0).unwrap()];
        let t = &assign_slippage(&pool, &trades, 0.005).unwrap()[0];
        let isolated = 10.0 * 100.0 / 110.0;
        assert!((t.min_amount_out.unwrap() - 0.995 * isolated).abs() < 1e-12);
        assert!((t.min_amount_out.unwrap() - 9.0455).abs() < 1e-4);
        let exact = &assign_slippage(&pool, &trades, 0.0).unwrap()[0];
        let (_, out) = execute_trade(&pool, exact).unwrap();
        assert!(exact.accepts(out));
        assert!(assign_slippage(&pool, &trades, -0.1).is_err());
    }

    #[test]
    fn split_examples() {
        let trades = vec![Trade::buy(0, 1000.0).unwrap(), Trade::sell(1, 1000.0).unwrap()];
        assert_eq!(split_trades(&trades, 1, SplitTarget::All), trades);
        let split = split_trades(&trades, 1000, SplitTarget::All);
        assert_eq!(split.len(), 2000);
        assert!(split.iter().all(|t| t.amount_in == 1.0));
        let mut ids: Vec<u64> = split.iter().map(|t| t.id.0).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 2000);

        let one = split_trades(&trades, 4, SplitTarget::One(TradeId(1)));
        assert_eq!(one.len(), 5);
        assert_eq!(one[0], trades[0]);
        assert!(one[1..].iter().all(|t| t.owner == Some(1) && t.direction == Direction::SellX));
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, &[10, 0, 0]);
        assert_eq!(a, derive_seed(7, &[10, 0, 0]));
        assert_ne!(a, derive_seed(7, &[10, 1, 0]));
        assert_ne!(a, derive_seed(7, &[10, 0, 1]));
        assert_ne!(a, derive_seed(8, &[10, 0, 0]));
    }
}
