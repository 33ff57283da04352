//! Intra-block price volatility, post-trade Gini, and min-max relative scores.

use serde::{Deserialize, Serialize};

use crate::amm::{Direction, ExecutionTrace, Pool, Step};
use crate::error::{ClvrError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolatilityReport {
    pub volatility: f64,
    pub n: usize,
    pub status_quo_price: f64,
}

/// Squared log deviation of the price of `now` from the price of `open`.
///
/// Every volatility computation in the crate goes through this function so
/// that brute-force enumeration and trace-based evaluation agree bit for bit.
#[inline]
pub fn log_deviation_sq(open: &Pool, now: &Pool) -> f64 {
    reserve_log_ratio_sq(open.reserve_x, open.reserve_y, now.reserve_x, now.reserve_y)
}

/// [`log_deviation_sq`] for the pool state recorded after `step`.
#[inline]
pub fn step_deviation_sq(open: &Pool, step: &Step) -> f64 {
    reserve_log_ratio_sq(open.reserve_x, open.reserve_y, step.reserve_x, step.reserve_y)
}

/// `ln((y/x)/(y0/x0))²`, evaluated as `ln_1p` of a cross-product difference.
/// Small moves keep their relative precision, and swapping the roles of X
/// and Y gives exactly the negated logarithm.
#[inline]
fn reserve_log_ratio_sq(x0: f64, y0: f64, x: f64, y: f64) -> f64 {
    let (a, b) = (y * x0, x * y0);
    let d = ((a - b) / b).ln_1p();
    d * d
}

/// Mean squared log deviation of every post-step price from the opening price.
/// Failed steps count, repeating the previous price.
pub fn volatility(trace: &ExecutionTrace) -> Result<VolatilityReport> {
    if trace.steps.is_empty() {
        return Err(ClvrError::UndefinedMetric("volatility of an empty block"));
    }
    let open = &trace.initial_pool;
    let sum: f64 = trace.steps.iter().map(|s| step_deviation_sq(open, s)).sum();
    Ok(VolatilityReport {
        volatility: sum / trace.steps.len() as f64,
        n: trace.steps.len(),
        status_quo_price: trace.initial_price,
    })
}

/// Volatility with prices quoted the other way round (X per Y).
pub fn volatility_inverse_quote(trace: &ExecutionTrace) -> Result<f64> {
    if trace.steps.is_empty() {
        return Err(ClvrError::UndefinedMetric("volatility of an empty block"));
    }
    let open = &trace.initial_pool;
    let sum: f64 = trace
        .steps
        .iter()
        .map(|s| reserve_log_ratio_sq(open.reserve_y, open.reserve_x, s.reserve_y, s.reserve_x))
        .sum();
    Ok(sum / trace.steps.len() as f64)
}

/// True when both quote directions give the same volatility to 1e-12 relative.
pub fn volatility_is_quote_invariant(trace: &ExecutionTrace) -> Result<bool> {
    let direct = volatility(trace)?.volatility;
    let inverse = volatility_inverse_quote(trace)?;
    let scale = direct.abs().max(inverse.abs());
    Ok(scale == 0.0 || (direct - inverse).abs() <= 1e-12 * scale)
}

/// Redeemed amount expressed in Y units at the status-quo price.
#[inline]
pub fn wealth(direction: Direction, amount_out: f64, status_quo_price: f64) -> f64 {
    match direction {
        Direction::SellX => amount_out,
        Direction::BuyY => amount_out * status_quo_price,
    }
}

/// Gini coefficient of a non-negative wealth vector.
pub fn gini_of_wealth(wealth: &[f64]) -> Result<f64> {
    if wealth.is_empty() {
        return Err(ClvrError::UndefinedMetric("gini of an empty block"));
    }
    let mut sorted = wealth.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(ClvrError::UndefinedMetric("gini with zero total wealth"));
    }
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, w)| (i as f64 + 1.0) * w)
        .sum();
    let g = 2.0 * weighted / (n * total) - (n + 1.0) / n;
    // rounding can push a perfectly equal vector a hair below zero
    Ok(g.max(0.0))
}

/// Gini of post-trade wealth. Failed trades receive nothing.
pub fn gini(trace: &ExecutionTrace, status_quo_price: f64) -> Result<f64> {
    let w: Vec<f64> = trace
        .steps
        .iter()
        .map(|s| {
            if s.failed {
                0.0
            } else {
                wealth(s.direction, s.amount_out, status_quo_price)
            }
        })
        .collect();
    gini_of_wealth(&w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeScore {
    pub value_pct: f64,
    pub global_min: f64,
    pub global_max: f64,
}

/// Places `raw` on a 0..100 scale between the global min and max.
pub fn relative_to(raw: f64, global_min: f64, global_max: f64) -> RelativeScore {
    let span = global_max - global_min;
    let value_pct = if span > 0.0 {
        ((raw - global_min) / span * 100.0).clamp(0.0, 100.0)
    } else {
        0.0
    };
    RelativeScore {
        value_pct,
        global_min,
        global_max,
    }
}

pub fn relative_score(raw: f64, all_orderings_values: &[f64]) -> Result<RelativeScore> {
    if all_orderings_values.is_empty() {
        return Err(ClvrError::UndefinedMetric("relative score over no orderings"));
    }
    let (lo, hi) = all_orderings_values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(relative_to(raw, lo.min(raw), hi.max(raw)))
}
