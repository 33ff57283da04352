//! How badly does optimizing volatility serve equality, and vice versa?

use serde::{Deserialize, Serialize};

use super::stats::mean;
use super::{render_columns, run_trials, LANE_WORKLOAD};
use crate::amm::{Pool, Trade};
use crate::error::{ClvrError, Result};
use crate::metrics::relative_to;
use crate::sequencers::{enumerate_orderings, DEFAULT_FACTORIAL_CAP};
use crate::workload::{derive_seed, generate_block, WorkloadSpec, DEFAULT_RESERVES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictConfig {
    pub block_sizes: Vec<usize>,
    pub trials: usize,
    pub workload: WorkloadSpec,
    pub pool: Pool,
    pub seed: u64,
    pub factorial_cap: usize,
}

impl Default for ConflictConfig {
    fn default() -> Self {
        ConflictConfig {
            block_sizes: vec![3, 5],
            trials: 100,
            workload: WorkloadSpec::standard(0, 0),
            pool: Pool::new(DEFAULT_RESERVES, DEFAULT_RESERVES).expect("valid"),
            seed: 0,
            factorial_cap: DEFAULT_FACTORIAL_CAP,
        }
    }
}

/// Relative scores (0 = global best, 100 = global worst) of each extreme
/// ordering under the other objective, for one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConflictScores {
    pub gini_of_volatility_min: f64,
    pub gini_of_volatility_max: f64,
    pub volatility_of_gini_min: f64,
    pub volatility_of_gini_max: f64,
    pub volatility_min: f64,
    pub volatility_of_gini_min_raw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictRow {
    pub n: usize,
    pub trials: usize,
    pub rel_gini_volatility_min: f64,
    pub rel_gini_volatility_max: f64,
    pub rel_volatility_gini_min: f64,
    pub rel_volatility_gini_max: f64,
    pub per_trial: Vec<ConflictScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictTable {
    pub rows: Vec<ConflictRow>,
}

impl ConflictTable {
    pub fn row(&self, n: usize) -> Option<&ConflictRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_text(&self) -> String {
        let header = [
            "n",
            "gini@min-vol%",
            "gini@max-vol%",
            "vol@min-gini%",
            "vol@max-gini%",
        ]
        .map(String::from);
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    format!("{:.2}", r.rel_gini_volatility_min),
                    format!("{:.2}", r.rel_gini_volatility_max),
                    format!("{:.2}", r.rel_volatility_gini_min),
                    format!("{:.2}", r.rel_volatility_gini_max),
                ]
            })
            .collect();
        render_columns(&header, &rows)
    }
}

#[derive(Clone, Copy)]
struct Extreme {
    key: f64,
    other: f64,
}

impl Extreme {
    fn offer_min(slot: &mut Option<Extreme>, key: f64, other: f64) {
        if slot.is_none_or(|e| key < e.key) {
            *slot = Some(Extreme { key, other });
        }
    }

    fn offer_max(slot: &mut Option<Extreme>, key: f64, other: f64) {
        if slot.is_none_or(|e| key > e.key) {
            *slot = Some(Extreme { key, other });
        }
    }
}

/// Enumerates every ordering of a block once, tracking both metrics.
/// Ties within an objective go to the lexicographically smallest ordering.
pub fn conflict_scores(pool: &Pool, trades: &[Trade], cap: usize) -> Result<ConflictScores> {
    let (mut vmin, mut vmax, mut gmin, mut gmax) = (None, None, None, None);
    enumerate_orderings(pool, trades, cap, |leaf| {
        let (v, g) = (leaf.volatility, leaf.gini()?);
        Extreme::offer_min(&mut vmin, v, g);
        Extreme::offer_max(&mut vmax, v, g);
        Extreme::offer_min(&mut gmin, g, v);
        Extreme::offer_max(&mut gmax, g, v);
        Ok(())
    })?;
    let (Some(vmin), Some(vmax), Some(gmin), Some(gmax)) = (vmin, vmax, gmin, gmax) else {
        return Err(ClvrError::UndefinedMetric("objective conflict of an empty block"));
    };
    let rel_gini = |g| relative_to(g, gmin.key, gmax.key).value_pct;
    let rel_vol = |v| relative_to(v, vmin.key, vmax.key).value_pct;
    Ok(ConflictScores {
        gini_of_volatility_min: rel_gini(vmin.other),
        gini_of_volatility_max: rel_gini(vmax.other),
        volatility_of_gini_min: rel_vol(gmin.other),
        volatility_of_gini_max: rel_vol(gmax.other),
        volatility_min: vmin.key,
        volatility_of_gini_min_raw: gmin.other,
    })
}

pub fn objective_conflict(cfg: &ConflictConfig) -> Result<ConflictTable> {
    cfg.pool.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.block_sizes {
        if n == 0 {
            return Err(ClvrError::InvalidConfig("block size must be at least 1".into()));
        }
        if n > cfg.factorial_cap {
            return Err(ClvrError::Intractable { n, cap: cfg.factorial_cap });
        }
        let per_trial = run_trials(cfg.trials, |t| {
            let spec = cfg
                .workload
                .with_n(n)
                .with_seed(derive_seed(cfg.seed, &[n as u64, t as u64, LANE_WORKLOAD]));
            conflict_scores(&cfg.pool, &generate_block(&spec)?, cfg.factorial_cap)
        })?;
        let col = |f: fn(&ConflictScores) -> f64| mean(&per_trial.iter().map(f).collect::<Vec<_>>());
        rows.push(ConflictRow {
            n,
            trials: cfg.trials,
            rel_gini_volatility_min: col(|s| s.gini_of_volatility_min),
            rel_gini_volatility_max: col(|s| s.gini_of_volatility_max),
            rel_volatility_gini_min: col(|s| s.volatility_of_gini_min),
            rel_volatility_gini_max: col(|s| s.volatility_of_gini_max),
            per_trial,
        });
    }
    Ok(ConflictTable { rows })
}
