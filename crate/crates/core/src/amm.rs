//! Constant-product swap execution.
//!
//! A [`Pool`] holds reserves of tokens X and Y. Selling X moves the spot price
//! `Y / X` down, buying X with Y moves it up. Everything here is a pure
//! function of its inputs: executing a trade returns a new pool rather than
//! mutating the old one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ClvrError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pool {
    pub reserve_x: f64,
    pub reserve_y: f64,
    pub fee_rate: f64,
}

impl Pool {
    /// Frictionless pool (`fee_rate = 0`).
    pub fn new(reserve_x: f64, reserve_y: f64) -> Result<Self> {
        Self::with_fee(reserve_x, reserve_y, 0.0)
    }

    pub fn with_fee(reserve_x: f64, reserve_y: f64, fee_rate: f64) -> Result<Self> {
        let pool = Pool {
            reserve_x,
            reserve_y,
            fee_rate,
        };
        pool.validate()?;
        Ok(pool)
    }

    pub fn validate(&self) -> Result<()> {
        let ok_reserve = |r: f64| r.is_finite() && r > 0.0;
        if !ok_reserve(self.reserve_x) || !ok_reserve(self.reserve_y) {
            return Err(ClvrError::InvalidPool(format!(
                "reserves must be finite and positive, got ({}, {})",
                self.reserve_x, self.reserve_y
            )));
        }
        if !(0.0..1.0).contains(&self.fee_rate) {
            return Err(ClvrError::InvalidPool(format!(
                "fee rate must lie in [0, 1), got {}",
                self.fee_rate
            )));
        }
        Ok(())
    }

    /// Spot price quoted as Y per X.
    #[inline]
    pub fn spot_price(&self) -> f64 {
        self.reserve_y / self.reserve_x
    }

    /// Same pool with reserves scaled by `factor` (fee unchanged).
    pub fn scaled(&self, factor: f64) -> Self {
        Pool {
            reserve_x: self.reserve_x * factor,
            reserve_y: self.reserve_y * factor,
            fee_rate: self.fee_rate,
        }
    }
}

pub fn spot_price(pool: &Pool) -> f64 {
    pool.spot_price()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TradeId(pub u64);

impl fmt::Display for TradeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Pay X, receive Y. Lowers the spot price.
    #[serde(rename = "sell")]
    SellX,
    /// Pay Y, receive X. Raises the spot price.
    #[serde(rename = "buy")]
    BuyY,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::SellX => Direction::BuyY,
            Direction::BuyY => Direction::SellX,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::SellX => "sell",
            Direction::BuyY => "buy",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sell" | "sellx" => Ok(Direction::SellX),
            "buy" | "buyy" => Ok(Direction::BuyY),
            other => Err(format!("unknown direction `{other}` (expected sell or buy)")),
        }
    }
}

/// A pending swap. `amount_in` is in X for sells and in Y for buys;
/// `min_amount_out` is in the received token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trade {
    pub id: TradeId,
    pub direction: Direction,
    pub amount_in: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_amount_out: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<u64>,
}

impl Trade {
    pub fn new(id: u64, direction: Direction, amount_in: f64) -> Result<Self> {
        let trade = Trade {
            id: TradeId(id),
            direction,
            amount_in,
            min_amount_out: None,
            owner: None,
        };
        trade.validate()?;
        Ok(trade)
    }

    pub fn sell(id: u64, amount_in: f64) -> Result<Self> {
        Self::new(id, Direction::SellX, amount_in)
    }

    pub fn buy(id: u64, amount_in: f64) -> Result<Self> {
        Self::new(id, Direction::BuyY, amount_in)
    }

    pub fn with_min_amount_out(mut self, min_amount_out: f64) -> Result<Self> {
        self.min_amount_out = Some(min_amount_out);
        self.validate()?;
        Ok(self)
    }

    pub fn with_owner(mut self, owner: u64) -> Self {
        self.owner = Some(owner);
        self
    }

    /// Owner label, defaulting to the trade's own id.
    pub fn owner_or_id(&self) -> u64 {
        self.owner.unwrap_or(self.id.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amount_in.is_finite() && self.amount_in > 0.0) {
            return Err(ClvrError::InvalidTrade {
                id: self.id,
                reason: format!("amount_in must be positive and finite, got {}", self.amount_in),
            });
        }
        if let Some(m) = self.min_amount_out {
            if !(m.is_finite() && m >= 0.0) {
                return Err(ClvrError::InvalidTrade {
                    id: self.id,
                    reason: format!("min_amount_out must be non-negative, got {m}"),
                });
            }
        }
        Ok(())
    }

    /// Whether `amount_out` satisfies this trade's slippage bound.
    #[inline]
    pub fn accepts(&self, amount_out: f64) -> bool {
        self.min_amount_out.is_none_or(|m| amount_out >= m)
    }
}

/// A permutation of a block's trade ids, in execution order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ordering(pub Vec<TradeId>);

impl Ordering {
    pub fn ids(&self) -> &[TradeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Ordering that executes `trades` in the order given.
    pub fn identity(trades: &[Trade]) -> Self {
        Ordering(trades.iter().map(|t| t.id).collect())
    }

    pub(crate) fn from_indices(trades: &[Trade], indices: &[usize]) -> Self {
        Ordering(indices.iter().map(|&i| trades[i].id).collect())
    }

    /// Resolves the ordering into indices of `trades`, checking it is a bijection.
    pub fn to_indices(&self, trades: &[Trade]) -> Result<Vec<usize>> {
        let index = index_by_id(trades)?;
        if self.0.len() != trades.len() {
            return Err(ClvrError::NotAPermutation(format!(
                "ordering has {} entries but the block has {} trades",
                self.0.len(),
                trades.len()
            )));
        }
        let mut seen = vec![false; trades.len()];
        self.0
            .iter()
            .map(|id| {
                let &i = index
                    .get(id)
                    .ok_or_else(|| ClvrError::NotAPermutation(format!("unknown trade id {id}")))?;
                if std::mem::replace(&mut seen[i], true) {
                    return Err(ClvrError::NotAPermutation(format!("trade id {id} repeated")));
                }
                Ok(i)
            })
            .collect()
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, id) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

pub(crate) fn index_by_id(trades: &[Trade]) -> Result<HashMap<TradeId, usize>> {
    let mut index = HashMap::with_capacity(trades.len());
    for (i, t) in trades.iter().enumerate() {
        if index.insert(t.id, i).is_some() {
            return Err(ClvrError::NotAPermutation(format!("duplicate trade id {} in block", t.id)));
        }
    }
    Ok(index)
}

/// Indices of `trades` sorted by trade id; the canonical tie-break order.
pub(crate) fn indices_by_id(trades: &[Trade]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..trades.len()).collect();
    idx.sort_by_key(|&i| trades[i].id);
    idx
}

/// Executes one swap with no slippage check.
///
/// The fee is taken from the input before the invariant is applied and stays
/// in the pool, so `X·Y` never decreases and is constant when `fee_rate = 0`.
pub fn execute_trade(pool: &Pool, trade: &Trade) -> Result<(Pool, f64)> {
    let effective_in = trade.amount_in * (1.0 - pool.fee_rate);
    let (reserve_in, reserve_out) = match trade.direction {
        Direction::SellX => (pool.reserve_x, pool.reserve_y),
        Direction::BuyY => (pool.reserve_y, pool.reserve_x),
    };
    let amount_out = effective_in * reserve_out / (reserve_in + effective_in);
    let new_in = reserve_in + trade.amount_in;
    let new_out = reserve_out - amount_out;
    if !(amount_out.is_finite() && new_in.is_finite() && new_out.is_finite())
        || amount_out >= reserve_out
        || new_out <= 0.0
    {
        return Err(ClvrError::Execution { id: trade.id });
    }
    let next = match trade.direction {
        Direction::SellX => Pool {
            reserve_x: new_in,
            reserve_y: new_out,
            fee_rate: pool.fee_rate,
        },
        Direction::BuyY => Pool {
            reserve_x: new_out,
            reserve_y: new_in,
            fee_rate: pool.fee_rate,
        },
    };
    Ok((next, amount_out))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub trade_id: TradeId,
    pub direction: Direction,
    pub amount_in: f64,
    pub amount_out: f64,
    pub failed: bool,
    pub price_after: f64,
    pub reserve_x: f64,
    pub reserve_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub initial_pool: Pool,
    pub initial_price: f64,
    pub steps: Vec<Step>,
    pub final_pool: Pool,
}

impl ExecutionTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn failure_count(&self) -> usize {
        self.steps.iter().filter(|s| s.failed).count()
    }

    pub fn prices(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.price_after)
    }

    pub fn amount_out_of(&self, id: TradeId) -> Option<f64> {
        self.steps.iter().find(|s| s.trade_id == id).map(|s| s.amount_out)
    }
}

/// Runs `trades` through `pool` in the order given by `ordering`.
///
/// With `enforce_slippage`, a trade whose output falls below its
/// `min_amount_out` is marked failed and leaves the pool untouched.
pub fn execute_block(
    pool: &Pool,
    trades: &[Trade],
    ordering: &Ordering,
    enforce_slippage: bool,
) -> Result<ExecutionTrace> {
    pool.validate()?;
    let indices = ordering.to_indices(trades)?;
    execute_indices(pool, trades, &indices, enforce_slippage)
}

pub(crate) fn execute_indices(
    pool: &Pool,
    trades: &[Trade],
    indices: &[usize],
    enforce_slippage: bool,
) -> Result<ExecutionTrace> {
    let mut current = *pool;
    let mut steps = Vec::with_capacity(indices.len());
    for &i in indices {
        let trade = &trades[i];
        let (next, out) = execute_trade(&current, trade)?;
        let failed = enforce_slippage && !trade.accepts(out);
        if !failed {
            current = next;
        }
        steps.push(Step {
            trade_id: trade.id,
            direction: trade.direction,
            amount_in: trade.amount_in,
            amount_out: if failed { 0.0 } else { out },
            failed,
            price_after: current.spot_price(),
            reserve_x: current.reserve_x,
            reserve_y: current.reserve_y,
        });
    }
    Ok(ExecutionTrace {
        initial_pool: *pool,
        initial_price: pool.spot_price(),
        steps,
        final_pool: current,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool100() -> Pool {
        Pool::new(100.0, 100.0).unwrap()
    }

    #[test]
    fn two_sells_on_hundred_pool() {
        let (after, out1) = execute_trade(&pool100(), &Trade::sell(0, 10.0).unwrap()).unwrap();
        assert!((out1 - 9.09).abs() < 0.01);
        assert!((after.reserve_x - 110.0).abs() < 1e-12);
        assert!((after.reserve_y - 90.91).abs() < 0.01);
        let (_, out2) = execute_trade(&after, &Trade::sell(1, 10.0).unwrap()).unwrap();
        assert!((out2 - 7.58).abs() < 0.01);
    }

    #[test]
    fn infinitesimal_trade_executes_at_spot() {
        let pool = Pool::new(250.0, 1000.0).unwrap();
        let eps = 1e-7;
        let (_, out) = execute_trade(&pool, &Trade::sell(0, eps).unwrap()).unwrap();
        assert!((out / eps - pool.spot_price()).abs() < 1e-6);
    }

    #[test]
    fn spot_price_examples() {
        assert_eq!(pool100().spot_price(), 1.0);
        assert_eq!(Pool::new(2e6, 2e6).unwrap().spot_price(), 1.0);
        let (after, _) = execute_trade(&pool100(), &Trade::sell(0, 10.0).unwrap()).unwrap();
        assert!((after.spot_price() - 0.8264).abs() < 1e-3);
    }

    #[test]
    fn fee_accrues_to_reserves() {
        let pool = Pool::with_fee(100.0, 100.0, 0.003).unwrap();
        let (after, out) = execute_trade(&pool, &Trade::sell(0, 10.0).unwrap()).unwrap();
        let eff = 10.0 * 0.997;
        assert!((out - eff * 100.0 / (100.0 + eff)).abs() < 1e-12);
        assert!(after.reserve_x * after.reserve_y > 100.0 * 100.0);
    }

    #[test]
    fn empty_block_is_noop() {
        let trace = execute_block(&pool100(), &[], &Ordering::default(), true).unwrap();
        assert!(trace.is_empty());
        assert_eq!(trace.final_pool, pool100());
    }

    #[test]
    fn failed_step_leaves_pool_unchanged() {
        let trades = vec![
            Trade::sell(0, 10.0).unwrap(),
            Trade::sell(1, 10.0).unwrap().with_min_amount_out(9.0).unwrap(),
        ];
        let ord = Ordering::identity(&trades);
        let trace = execute_block(&pool100(), &trades, &ord, true).unwrap();
        assert!(trace.steps[1].failed);
        assert_eq!(trace.steps[1].amount_out, 0.0);
        assert_eq!(trace.steps[1].price_after, trace.steps[0].price_after);
        let lax = execute_block(&pool100(), &trades, &ord, false).unwrap();
        assert!(!lax.steps[1].failed);
    }

    #[test]
    fn rejects_non_permutations() {
        let trades = vec![Trade::sell(0, 1.0).unwrap(), Trade::buy(1, 1.0).unwrap()];
        for bad in [vec![0], vec![0, 0], vec![0, 7], vec![0, 1, 1]] {
            let ord = Ordering(bad.into_iter().map(TradeId).collect());
            assert!(matches!(
                execute_block(&pool100(), &trades, &ord, false),
                Err(ClvrError::NotAPermutation(_))
            ));
        }
        let dup = vec![Trade::sell(3, 1.0).unwrap(), Trade::buy(3, 1.0).unwrap()];
        let ord = Ordering(vec![TradeId(3), TradeId(3)]);
        assert!(execute_block(&pool100(), &dup, &ord, false).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(Pool::new(0.0, 1.0).is_err());
        assert!(Pool::new(1.0, f64::INFINITY).is_err());
        assert!(Pool::with_fee(1.0, 1.0, 1.0).is_err());
        assert!(Trade::sell(0, 0.0).is_err());
        assert!(Trade::buy(0, -1.0).is_err());
        assert!(Trade::buy(0, 1.0).unwrap().with_min_amount_out(-0.1).is_err());
    }

    #[test]
    fn overflow_is_an_execution_error() {
        let pool = Pool::new(1.0, 1.0).unwrap();
        let trade = Trade::sell(0, f64::MAX).unwrap();
        assert!(matches!(execute_trade(&pool, &trade), Err(ClvrError::Execution { .. })));
    }
}
