//! Does splitting a trade into equal parts pay off under CLVR?

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::mean;
use super::{render_columns, run_trials, LANE_WORKLOAD};
use crate::amm::{execute_block, ExecutionTrace, Pool, Trade, TradeId};
use crate::error::{ClvrError, Result};
use crate::sequencers::clvr;
use crate::workload::{derive_seed, generate_block, split_trades, SplitTarget, WorkloadSpec, DEFAULT_RESERVES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// A single buy of each tested size splits; nine background trades do not.
    OneSplits,
    /// All ten trades split.
    AllSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingConfig {
    pub mode: SplitMode,
    /// Sizes of the splitting buy (`OneSplits` only).
    pub trade_sizes: Vec<f64>,
    pub split_factors: Vec<usize>,
    pub trials: usize,
    /// Trades in the block besides the splitter (`OneSplits`), or the whole
    /// block (`AllSplit`).
    pub background_trades: usize,
    pub workload: WorkloadSpec,
    pub pool: Pool,
    pub seed: u64,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        SplittingConfig {
            mode: SplitMode::OneSplits,
            trade_sizes: vec![10.0, 100.0, 1_000.0, 10_000.0, 100_000.0],
            split_factors: vec![1, 2, 5, 10],
            trials: 1000,
            background_trades: 9,
            workload: WorkloadSpec::standard(0, 0),
            pool: Pool::new(DEFAULT_RESERVES, DEFAULT_RESERVES).expect("valid"),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCell {
    /// Size of the splitting trade; `None` in `AllSplit` mode.
    pub trade_size: Option<f64>,
    pub split_factor: usize,
    /// Mean percent change in amount received after splitting.
    pub mean_gain_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingTable {
    pub mode: SplitMode,
    pub trials: usize,
    pub cells: Vec<SplitCell>,
}

impl SplittingTable {
    pub fn cell(&self, trade_size: Option<f64>, split_factor: usize) -> Option<&SplitCell> {
        self.cells
            .iter()
            .find(|c| c.trade_size == trade_size && c.split_factor == split_factor)
    }

    pub fn to_text(&self) -> String {
        let header = ["size", "splits", "mean_gain%"].map(String::from);
        let rows: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|c| {
                vec![
                    c.trade_size.map_or("all".into(), |s| format!("{s}")),
                    c.split_factor.to_string(),
                    format!("{:.6}", c.mean_gain_pct),
                ]
            })
            .collect();
        render_columns(&header, &rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trade_size,split_factor,mean_gain_pct\n");
        for c in &self.cells {
            let size = c.trade_size.map_or(String::new(), |s| format!("{s}"));
            out.push_str(&format!("{size},{},{:e}\n", c.split_factor, c.mean_gain_pct));
        }
        out
    }
}

/// Orders `trades` with CLVR and totals what each owner receives.
pub fn clvr_owner_outputs(pool: &Pool, trades: &[Trade]) -> Result<BTreeMap<u64, f64>> {
    let trace = clvr_trace(pool, trades)?;
    let owner_of: BTreeMap<TradeId, u64> = trades.iter().map(|t| (t.id, t.owner_or_id())).collect();
    let mut totals = BTreeMap::new();
    for s in &trace.steps {
        *totals.entry(owner_of[&s.trade_id]).or_insert(0.0) += s.amount_out;
    }
    Ok(totals)
}

pub fn clvr_trace(pool: &Pool, trades: &[Trade]) -> Result<ExecutionTrace> {
    let ordering = clvr(pool, trades)?;
    execute_block(pool, trades, &ordering, false)
}

fn gain_pct(before: f64, after: f64) -> f64 {
    100.0 * (after - before) / before
}

pub fn splitting_experiment(cfg: &SplittingConfig) -> Result<SplittingTable> {
    if cfg.split_factors.contains(&0) {
        return Err(ClvrError::InvalidConfig("split factor must be at least 1".into()));
    }
    cfg.pool.validate()?;
    let background = |t: usize| -> Result<Vec<Trade>> {
        let spec = cfg
            .workload
            .with_n(cfg.background_trades)
            .with_seed(derive_seed(cfg.seed, &[cfg.background_trades as u64, t as u64, LANE_WORKLOAD]));
        generate_block(&spec)
    };
    let cells = match cfg.mode {
        SplitMode::OneSplits => {
            if cfg.trade_sizes.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return Err(ClvrError::InvalidConfig("trade sizes must be positive".into()));
            }
            // per trial: gains[size][factor]
            let per_trial = run_trials(cfg.trials, |t| {
                let others = background(t)?;
                let star_id = cfg.background_trades as u64;
                cfg.trade_sizes
                    .iter()
                    .map(|&size| {
                        let mut block = others.clone();
                        block.push(Trade::buy(star_id, size)?);
                        let base = clvr_owner_outputs(&cfg.pool, &block)?[&star_id];
                        cfg.split_factors
                            .iter()
                            .map(|&k| {
                                let split = split_trades(&block, k, SplitTarget::One(TradeId(star_id)));
                                let after = clvr_owner_outputs(&cfg.pool, &split)?[&star_id];
                                Ok(gain_pct(base, after))
                            })
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect::<Result<Vec<Vec<f64>>>>()
            })?;
            let mut cells = Vec::new();
            for (si, &size) in cfg.trade_sizes.iter().enumerate() {
                for (fi, &k) in cfg.split_factors.iter().enumerate() {
                    let g: Vec<f64> = per_trial.iter().map(|r| r[si][fi]).collect();
                    cells.push(SplitCell {
                        trade_size: Some(size),
                        split_factor: k,
                        mean_gain_pct: mean(&g),
                    });
                }
            }
            cells
        }
        SplitMode::AllSplit => {
            let per_trial = run_trials(cfg.trials, |t| {
                let block = background(t)?;
                let base = clvr_owner_outputs(&cfg.pool, &block)?;
                cfg.split_factors
                    .iter()
                    .map(|&k| {
                        let after = clvr_owner_outputs(&cfg.pool, &split_trades(&block, k, SplitTarget::All))?;
                        let gains: Vec<f64> = base.iter().map(|(o, &b)| gain_pct(b, after[o])).collect();
                        Ok(mean(&gains))
                    })
                    .collect::<Result<Vec<f64>>>()
            })?;
            cfg.split_factors
                .iter()
                .enumerate()
                .map(|(fi, &k)| SplitCell {
                    trade_size: None,
                    split_factor: k,
                    mean_gain_pct: mean(&per_trial.iter().map(|r| r[fi]).collect::<Vec<_>>()),
                })
                .collect()
        }
    };
    Ok(SplittingTable {
        mode: cfg.mode,
        trials: cfg.trials,
        cells,
    })
}
