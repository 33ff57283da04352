//! Exhaustive search over all orderings of a block.
//!
//! Enumeration is a depth-first walk in lexicographic id order that shares
//! pool state along common prefixes, so a block of `n` trades costs about
//! `e·n!` swap evaluations rather than `n·n!`.

use serde::{Deserialize, Serialize};

use crate::amm::{execute_trade, indices_by_id, Ordering, Pool, Trade};
use crate::error::{ClvrError, Result};
use crate::metrics::{gini_of_wealth, log_deviation_sq, wealth};

/// Largest block the brute-force search accepts by default (12! ≈ 4.8e8).
pub const DEFAULT_FACTORIAL_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Volatility,
    Gini,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Min,
    Max,
}

/// One complete ordering reached by [`enumerate_orderings`].
pub struct Leaf<'a> {
    /// Indices into the trade slice, in execution order.
    pub order: &'a [usize],
    pub volatility: f64,
    /// Per-step wealth (Y units at the opening price), in execution order.
    pub wealth: &'a [f64],
}

impl Leaf<'_> {
    pub fn gini(&self) -> Result<f64> {
        gini_of_wealth(self.wealth)
    }
}

/// Visits every ordering of `trades` in lexicographic trade-id order.
pub fn enumerate_orderings<F>(pool: &Pool, trades: &[Trade], cap: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&Leaf<'_>) -> Result<()>,
{
    let n = trades.len();
    if n > cap {
        return Err(ClvrError::Intractable { n, cap });
    }
    if n == 0 {
        return Ok(());
    }
    let mut walk = Walk {
        trades,
        sorted: indices_by_id(trades),
        open: *pool,
        p0: pool.spot_price(),
        used: vec![false; n],
        order: Vec::with_capacity(n),
        wealth: Vec::with_capacity(n),
    };
    walk.descend(pool, 0.0, &mut visit)
}

struct Walk<'a> {
    trades: &'a [Trade],
    sorted: Vec<usize>,
    open: Pool,
    p0: f64,
    used: Vec<bool>,
    order: Vec<usize>,
    wealth: Vec<f64>,
}

impl Walk<'_> {
    fn descend<F>(&mut self, pool: &Pool, dev_sum: f64, visit: &mut F) -> Result<()>
    where
        F: FnMut(&Leaf<'_>) -> Result<()>,
    {
        let n = self.trades.len();
        if self.order.len() == n {
            return visit(&Leaf {
                order: &self.order,
                volatility: dev_sum / n as f64,
                wealth: &self.wealth,
            });
        }
        for k in 0..n {
            let i = self.sorted[k];
            if self.used[i] {
                continue;
            }
            let trade = &self.trades[i];
            let (next, out) = execute_trade(pool, trade)?;
            let sum = dev_sum + log_deviation_sq(&self.open, &next);
            self.used[i] = true;
            self.order.push(i);
            self.wealth.push(wealth(trade.direction, out, self.p0));
            self.descend(&next, sum, visit)?;
            self.wealth.pop();
            self.order.pop();
            self.used[i] = false;
        }
        Ok(())
    }
}

fn metric_of(leaf: &Leaf<'_>, metric: Metric) -> Result<f64> {
    match metric {
        Metric::Volatility => Ok(leaf.volatility),
        Metric::Gini => leaf.gini(),
    }
}

/// Optimal ordering and its metric value. Among equally good orderings the
/// lexicographically smallest id sequence wins.
pub fn brute_force(
    pool: &Pool,
    trades: &[Trade],
    metric: Metric,
    objective: Objective,
    cap: usize,
) -> Result<(Ordering, f64)> {
    if trades.is_empty() {
        return Err(ClvrError::UndefinedMetric("brute force over an empty block"));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    enumerate_orderings(pool, trades, cap, |leaf| {
        let v = metric_of(leaf, metric)?;
        let better = match (&best, objective) {
            (None, _) => true,
            (Some((_, b)), Objective::Min) => v < *b,
            (Some((_, b)), Objective::Max) => v > *b,
        };
        if better {
            best = Some((leaf.order.to_vec(), v));
        }
        Ok(())
    })?;
    let (order, value) = best.expect("non-empty block has at least one ordering");
    Ok((Ordering::from_indices(trades, &order), value))
}

/// Global minimum and maximum of a metric over all orderings.
pub fn metric_range(pool: &Pool, trades: &[Trade], metric: Metric, cap: usize) -> Result<(f64, f64)> {
    if trades.is_empty() {
        return Err(ClvrError::UndefinedMetric("brute force over an empty block"));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    enumerate_orderings(pool, trades, cap, |leaf| {
        let v = metric_of(leaf, metric)?;
        lo = lo.min(v);
        hi = hi.max(v);
        Ok(())
    })?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amm::{execute_block, TradeId};
    use crate::metrics::volatility;

    fn trio() -> Vec<Trade> {
        vec![
            Trade::sell(0, 2.0).unwrap(),
            Trade::sell(1, 5.0).unwrap(),
            Trade::buy(2, 10.0).unwrap(),
        ]
    }

    #[test]
    fn counterexample_optimum() {
        let pool = Pool::new(100.0, 100.0).unwrap();
        let (o, v) = brute_force(&pool, &trio(), Metric::Volatility, Objective::Min, 12).unwrap();
        assert_eq!(o.ids(), &[TradeId(1), TradeId(2), TradeId(0)]);
        assert!((v - 7.9e-3).abs() < 0.05e-3);
    }

    #[test]
    fn enumerated_volatility_is_bitwise_equal_to_trace_volatility() {
        let pool = Pool::new(100.0, 100.0).unwrap();
        let trades = trio();
        enumerate_orderings(&pool, &trades, 12, |leaf| {
            let o = Ordering::from_indices(&trades, leaf.order);
            let trace = execute_block(&pool, &trades, &o, false)?;
            assert_eq!(volatility(&trace)?.volatility, leaf.volatility);
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn visits_all_permutations_in_lexicographic_order() {
        let pool = Pool::new(100.0, 100.0).unwrap();
        let trades: Vec<Trade> = (0..4).rev().map(|i| Trade::sell(i, 1.0).unwrap()).collect();
        let mut seen = Vec::new();
        enumerate_orderings(&pool, &trades, 12, |leaf| {
            seen.push(leaf.order.iter().map(|&i| trades[i].id.0).collect::<Vec<_>>());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 24);
        let mut sorted = seen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn single_trade_and_cap() {
        let pool = Pool::new(100.0, 100.0).unwrap();
        let one = vec![Trade::buy(4, 1.0).unwrap()];
        let (o, _) = brute_force(&pool, &one, Metric::Gini, Objective::Max, 12).unwrap();
        assert_eq!(o.ids(), &[TradeId(4)]);
        let many: Vec<Trade> = (0..5).map(|i| Trade::sell(i, 1.0).unwrap()).collect();
        assert!(matches!(
            brute_force(&pool, &many, Metric::Volatility, Objective::Min, 4),
            Err(ClvrError::Intractable { n: 5, cap: 4 })
        ));
    }
}
