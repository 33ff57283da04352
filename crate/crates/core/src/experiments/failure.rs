//! Slippage-induced failure rates under random, VHGSR and CLVR ordering.

use serde::{Deserialize, Serialize};

use super::stats::mean;
use super::{render_columns, run_trials, LANE_RANDOM, LANE_WORKLOAD};
use crate::amm::{execute_block, Ordering, Pool, Trade};
use crate::error::{ClvrError, Result};
use crate::sequencers::{clvr_slippage_aware, random_ordering, vhgsr_slippage_aware};
use crate::workload::{assign_slippage, derive_seed, generate_block, WorkloadSpec, DEFAULT_SLIPPAGE_TOLERANCE, DEFAULT_RESERVES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureConfig {
    pub block_sizes: Vec<usize>,
    pub trials: usize,
    pub tolerance: f64,
    pub workload: WorkloadSpec,
    pub pool: Pool,
    pub seed: u64,
}

impl Default for FailureConfig {
    fn default() -> Self {
        FailureConfig {
            block_sizes: vec![3, 5, 8, 10],
            trials: 1000,
            tolerance: DEFAULT_SLIPPAGE_TOLERANCE,
            workload: WorkloadSpec::standard(0, 0),
            pool: Pool::new(DEFAULT_RESERVES, DEFAULT_RESERVES).expect("valid"),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub n: usize,
    pub trials: usize,
    /// Mean percentage of trades that failed.
    pub random_pct: f64,
    pub vhgsr_pct: f64,
    pub clvr_pct: f64,
    /// `100·(random − clvr)/random`, 0 when random ordering never fails.
    pub reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureTable {
    pub tolerance: f64,
    pub rows: Vec<FailureRow>,
}

impl FailureTable {
    pub fn row(&self, n: usize) -> Option<&FailureRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_text(&self) -> String {
        let header = ["n", "random%", "vhgsr%", "clvr%", "reduction%"].map(String::from);
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    format!("{:.2}", r.random_pct),
                    format!("{:.2}", r.vhgsr_pct),
                    format!("{:.2}", r.clvr_pct),
                    format!("{:.1}", r.reduction_pct),
                ]
            })
            .collect();
        render_columns(&header, &rows)
    }
}

fn failure_pct(pool: &Pool, trades: &[Trade], ordering: &Ordering) -> Result<f64> {
    let trace = execute_block(pool, trades, ordering, true)?;
    Ok(100.0 * trace.failure_count() as f64 / trades.len() as f64)
}

pub fn failure_rate_experiment(cfg: &FailureConfig) -> Result<FailureTable> {
    if cfg.block_sizes.contains(&0) {
        return Err(ClvrError::InvalidConfig("block size must be at least 1".into()));
    }
    cfg.pool.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.block_sizes {
        let per_trial = run_trials(cfg.trials, |t| {
            let spec = cfg
                .workload
                .with_n(n)
                .with_seed(derive_seed(cfg.seed, &[n as u64, t as u64, LANE_WORKLOAD]));
            let trades = assign_slippage(&cfg.pool, &generate_block(&spec)?, cfg.tolerance)?;
            let random = random_ordering(&trades, derive_seed(cfg.seed, &[n as u64, t as u64, LANE_RANDOM]));
            Ok([
                failure_pct(&cfg.pool, &trades, &random)?,
                failure_pct(&cfg.pool, &trades, &vhgsr_slippage_aware(&cfg.pool, &trades)?.ordering)?,
                failure_pct(&cfg.pool, &trades, &clvr_slippage_aware(&cfg.pool, &trades)?.ordering)?,
            ])
        })?;
        let col = |k: usize| mean(&per_trial.iter().map(|r| r[k]).collect::<Vec<_>>());
        let (random_pct, vhgsr_pct, clvr_pct) = (col(0), col(1), col(2));
        rows.push(FailureRow {
            n,
            trials: cfg.trials,
            random_pct,
            vhgsr_pct,
            clvr_pct,
            reduction_pct: if random_pct > 0.0 {
                100.0 * (random_pct - clvr_pct) / random_pct
            } else {
                0.0
            },
        });
    }
    Ok(FailureTable {
        tolerance: cfg.tolerance,
        rows,
    })
}
