//! Three-transaction sandwich attacks and a checker for the claim that CLVR
//! never sequences a risk-free profitable one.
//!
//! The front-run trades in the victim's direction, the back-run trades the
//! other way. Profit is measured in the token the front-run pays with.

use serde::{Deserialize, Serialize};

use crate::amm::{execute_block, Direction, Ordering, Pool, Trade, TradeId};
use crate::error::{ClvrError, Result};
use crate::sequencers::clvr;

pub const FRONT_ID: TradeId = TradeId(0);
pub const VICTIM_ID: TradeId = TradeId(1);
pub const BACK_ID: TradeId = TradeId(2);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichScenario {
    pub pool: Pool,
    pub victim_direction: Direction,
    pub victim_amount: f64,
    /// Paid by the front-run, in the victim's input token.
    pub front_run_amount: f64,
    /// Paid by the back-run, in the victim's output token.
    pub back_run_amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichOutcome {
    /// Back-run proceeds minus front-run cost, in the victim's input token.
    pub profit: f64,
    /// The back-run spent no more than the front-run received.
    pub risk_free: bool,
}

impl SandwichOutcome {
    pub fn is_risk_free_profit(&self) -> bool {
        self.risk_free && self.profit > 0.0
    }
}

impl SandwichScenario {
    /// Victim sells X; the usual orientation.
    pub fn new(pool: Pool, victim_amount: f64, front_run_amount: f64, back_run_amount: f64) -> Result<Self> {
        let s = SandwichScenario {
            pool,
            victim_direction: Direction::SellX,
            victim_amount,
            front_run_amount,
            back_run_amount,
        };
        s.trades()?;
        Ok(s)
    }

    /// Same attack against a victim trading the other way.
    pub fn mirrored(mut self) -> Self {
        self.victim_direction = self.victim_direction.opposite();
        self
    }

    pub fn trades(&self) -> Result<[Trade; 3]> {
        self.pool.validate()?;
        let dir = self.victim_direction;
        Ok([
            Trade::new(FRONT_ID.0, dir, self.front_run_amount)?,
            Trade::new(VICTIM_ID.0, dir, self.victim_amount)?,
            Trade::new(BACK_ID.0, dir.opposite(), self.back_run_amount)?,
        ])
    }

    pub fn attack_order() -> Ordering {
        Ordering(vec![FRONT_ID, VICTIM_ID, BACK_ID])
    }

    /// Opening price and the prices after executing the front-run alone and
    /// the back-run alone, quoted as Y per X.
    pub fn first_step_prices(&self) -> Result<(f64, f64, f64)> {
        let [front, _, back] = self.trades()?;
        let p0 = self.pool.spot_price();
        let (after_front, _) = crate::amm::execute_trade(&self.pool, &front)?;
        let (after_back, _) = crate::amm::execute_trade(&self.pool, &back)?;
        Ok((p0, after_front.spot_price(), after_back.spot_price()))
    }
}

/// Runs the three trades in `ordering` and scores the attacker.
pub fn evaluate_sandwich(scenario: &SandwichScenario, ordering: &Ordering) -> Result<SandwichOutcome> {
    let trades = scenario.trades()?;
    let trace = execute_block(&scenario.pool, &trades, ordering, false)?;
    let out = |id| {
        trace
            .amount_out_of(id)
            .ok_or_else(|| ClvrError::NotAPermutation(format!("trade {id} missing from ordering")))
    };
    let front_received = out(FRONT_ID)?;
    let back_received = out(BACK_ID)?;
    Ok(SandwichOutcome {
        profit: back_received - scenario.front_run_amount,
        risk_free: scenario.back_run_amount <= front_received,
    })
}

/// `false` only if CLVR puts the trades in attack order *and* the attack then
/// earns a risk-free profit. Expected to hold for every scenario.
pub fn clvr_blocks_sandwich(scenario: &SandwichScenario) -> Result<bool> {
    let trades = scenario.trades()?;
    let ordering = clvr(&scenario.pool, &trades)?;
    if ordering != SandwichScenario::attack_order() {
        return Ok(true);
    }
    Ok(!evaluate_sandwich(scenario, &ordering)?.is_risk_free_profit())
}

/// When CLVR's first pick is the front-run rather than the back-run, the
/// opening price must sit (geometrically) no closer to the back-run price:
/// `p0² ≤ p_b·p_f` for a selling victim, reversed for a buying one.
/// Returns `None` when CLVR does not open with the front-run.
pub fn front_first_price_inequality(scenario: &SandwichScenario) -> Result<Option<bool>> {
    let trades = scenario.trades()?;
    let ordering = clvr(&scenario.pool, &trades)?;
    if ordering.ids()[0] != FRONT_ID {
        return Ok(None);
    }
    let (p0, pf, pb) = scenario.first_step_prices()?;
    let (lhs, rhs) = (p0 * p0, pb * pf);
    let slack = 1e-12 * lhs.max(rhs);
    Ok(Some(match scenario.victim_direction {
        Direction::SellX => lhs <= rhs + slack,
        Direction::BuyY => rhs <= lhs + slack,
    }))
}
