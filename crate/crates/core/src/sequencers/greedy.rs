//! Greedy one-pass ordering rules: CLVR, GSR and the volume-heuristic GSR,
//! plus slippage-aware variants that skip trades which would fail right now.

use serde::{Deserialize, Serialize};

use crate::amm::{execute_trade, indices_by_id, Direction, Ordering, Pool, Trade, TradeId};
use crate::error::Result;
use crate::metrics::log_deviation_sq;

/// Result of a slippage-aware rule: the full ordering plus the trades the
/// rule sequenced as failures once nothing viable remained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlippageOrdering {
    pub ordering: Ordering,
    pub failed: Vec<TradeId>,
}

/// Picks, at every step, the pending trade whose execution leaves the price
/// closest (in squared log distance) to the block's opening price.
/// Ties go to the smallest trade id.
pub fn clvr(pool: &Pool, trades: &[Trade]) -> Result<Ordering> {
    let (order, _) = clvr_inner(pool, trades, false)?;
    Ok(Ordering::from_indices(trades, &order))
}

/// CLVR restricted at each step to trades that would meet their
/// `min_amount_out` if executed immediately.
pub fn clvr_slippage_aware(pool: &Pool, trades: &[Trade]) -> Result<SlippageOrdering> {
    let (order, n_ok) = clvr_inner(pool, trades, true)?;
    Ok(SlippageOrdering {
        ordering: Ordering::from_indices(trades, &order),
        failed: order[n_ok..].iter().map(|&i| trades[i].id).collect(),
    })
}

/// Returns the sequence and how many of its leading entries were viable.
fn clvr_inner(pool: &Pool, trades: &[Trade], slippage: bool) -> Result<(Vec<usize>, usize)> {
    let mut remaining = indices_by_id(trades);
    let mut order = Vec::with_capacity(trades.len());
    let mut current = *pool;
    while !remaining.is_empty() {
        let mut best: Option<(usize, f64, Pool)> = None;
        for (slot, &i) in remaining.iter().enumerate() {
            let (next, out) = execute_trade(&current, &trades[i])?;
            if slippage && !trades[i].accepts(out) {
                continue;
            }
            let dev = log_deviation_sq(pool, &next);
            if best.as_ref().is_none_or(|&(_, d, _)| dev < d) {
                best = Some((slot, dev, next));
            }
        }
        match best {
            Some((slot, _, next)) => {
                order.push(remaining.remove(slot));
                current = next;
            }
            None => break,
        }
    }
    let viable = order.len();
    order.extend(remaining);
    Ok((order, viable))
}

/// Trades the GSR direction rule allows next: the price-restoring side when
/// the price is off the opening level and that side is non-empty, otherwise
/// everything pending.
fn gsr_eligible(trades: &[Trade], remaining: &[usize], price: f64, p0: f64) -> Vec<usize> {
    let wanted = if price > p0 {
        Some(Direction::SellX)
    } else if price < p0 {
        Some(Direction::BuyY)
    } else {
        None
    };
    if let Some(dir) = wanted {
        let side: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| trades[i].direction == dir)
            .collect();
        if !side.is_empty() {
            return side;
        }
    }
    remaining.to_vec()
}

/// Trade size in X units, converting buy inputs at the opening price.
fn size_in_x(trade: &Trade, p0: f64) -> f64 {
    match trade.direction {
        Direction::SellX => trade.amount_in,
        Direction::BuyY => trade.amount_in / p0,
    }
}

#[derive(Clone, Copy)]
enum GsrPick {
    FirstById,
    Smallest,
}

fn pick(trades: &[Trade], candidates: &[usize], how: GsrPick, p0: f64) -> Option<usize> {
    match how {
        // candidates are kept in id order
        GsrPick::FirstById => candidates.first().copied(),
        GsrPick::Smallest => candidates.iter().copied().min_by(|&a, &b| {
            size_in_x(&trades[a], p0)
                .total_cmp(&size_in_x(&trades[b], p0))
                .then(trades[a].id.cmp(&trades[b].id))
        }),
    }
}

fn gsr_inner(
    pool: &Pool,
    trades: &[Trade],
    how: GsrPick,
    slippage: bool,
) -> Result<(Vec<usize>, usize)> {
    let p0 = pool.spot_price();
    let mut remaining = indices_by_id(trades);
    let mut order = Vec::with_capacity(trades.len());
    let mut current = *pool;
    while !remaining.is_empty() {
        let eligible = gsr_eligible(trades, &remaining, current.spot_price(), p0);
        let chosen = if slippage {
            let viable = |set: &[usize]| -> Result<Vec<usize>> {
                let mut ok = Vec::new();
                for &i in set {
                    let (_, out) = execute_trade(&current, &trades[i])?;
                    if trades[i].accepts(out) {
                        ok.push(i);
                    }
                }
                Ok(ok)
            };
            let mut ok = viable(&eligible)?;
            if ok.is_empty() {
                ok = viable(&remaining)?;
            }
            pick(trades, &ok, how, p0)
        } else {
            pick(trades, &eligible, how, p0)
        };
        let Some(i) = chosen else { break };
        let (next, _) = execute_trade(&current, &trades[i])?;
        current = next;
        remaining.retain(|&r| r != i);
        order.push(i);
    }
    let viable = order.len();
    order.extend(remaining);
    Ok((order, viable))
}

/// Greedy Sequencing Rule: after the price drifts above (below) the opening
/// price, the next trade must be a sell (buy) if one is pending. Within the
/// eligible side trades go in id order.
pub fn gsr(pool: &Pool, trades: &[Trade]) -> Result<Ordering> {
    let (order, _) = gsr_inner(pool, trades, GsrPick::FirstById, false)?;
    Ok(Ordering::from_indices(trades, &order))
}

/// GSR that picks the smallest eligible trade first.
pub fn vhgsr(pool: &Pool, trades: &[Trade]) -> Result<Ordering> {
    let (order, _) = gsr_inner(pool, trades, GsrPick::Smallest, false)?;
    Ok(Ordering::from_indices(trades, &order))
}

/// VHGSR with the same skip-if-it-would-fail adaptation as
/// [`clvr_slippage_aware`]. When no direction-eligible trade is viable, any
/// viable pending trade may go next; when none is, the rest fail.
pub fn vhgsr_slippage_aware(pool: &Pool, trades: &[Trade]) -> Result<SlippageOrdering> {
    let (order, n_ok) = gsr_inner(pool, trades, GsrPick::Smallest, true)?;
    Ok(SlippageOrdering {
        ordering: Ordering::from_indices(trades, &order),
        failed: order[n_ok..].iter().map(|&i| trades[i].id).collect(),
    })
}
