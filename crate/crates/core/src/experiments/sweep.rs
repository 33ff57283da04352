//! Same stream of trades cut into blocks of different sizes.

use serde::{Deserialize, Serialize};

use super::stats::{mean, percentile};
use super::{render_columns, run_trials, LANE_RANDOM, LANE_WORKLOAD};
use crate::amm::{execute_block, Pool, Trade};
use crate::error::{ClvrError, Result};
use crate::metrics::{step_deviation_sq, volatility};
use crate::sequencers::SequencerKind;
use crate::workload::{derive_seed, generate_block, WorkloadSpec, DEFAULT_RESERVES};

/// Price that volatility is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepReference {
    /// The pool price before the first trade of the stream, held fixed as the
    /// outside market price. Aggregate volatility is the mean over every
    /// executed step of the stream.
    Initial,
    /// Each block's own opening price; aggregate volatility is the mean of
    /// per-block volatilities.
    BlockOpen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub total_trades: usize,
    /// Trades per block; each must divide `total_trades`.
    pub block_sizes: Vec<usize>,
    pub trials: usize,
    pub sequencer: SequencerKind,
    pub reference: SweepReference,
    pub workload: WorkloadSpec,
    pub pool: Pool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            total_trades: 100,
            block_sizes: vec![1, 2, 5, 10, 20, 50, 100],
            trials: 1000,
            sequencer: SequencerKind::Clvr,
            reference: SweepReference::Initial,
            workload: WorkloadSpec::standard(0, 0),
            pool: Pool::new(DEFAULT_RESERVES, DEFAULT_RESERVES).expect("valid"),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub block_size: usize,
    pub blocks: usize,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub sequencer: String,
    pub total_trades: usize,
    pub trials: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn row(&self, block_size: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.block_size == block_size)
    }

    pub fn to_text(&self) -> String {
        let header = ["block_size", "blocks", "p25", "median", "p75"].map(String::from);
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.block_size.to_string(),
                    r.blocks.to_string(),
                    format!("{:.4e}", r.p25),
                    format!("{:.4e}", r.median),
                    format!("{:.4e}", r.p75),
                ]
            })
            .collect();
        render_columns(&header, &rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("block_size,blocks,p25,median,p75,mean\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:e},{:e},{:e},{:e}\n",
                r.block_size, r.blocks, r.p25, r.median, r.p75, r.mean
            ));
        }
        out
    }
}

/// Volatility of `trades` (in arrival order) cut into consecutive blocks of
/// `block_size`. The pool carries over between blocks and each block is
/// ordered from its own opening state.
pub fn aggregate_volatility(
    pool: &Pool,
    trades: &[Trade],
    block_size: usize,
    sequencer: SequencerKind,
    reference: SweepReference,
) -> Result<f64> {
    let mut current = *pool;
    let mut block_vols = Vec::with_capacity(trades.len() / block_size.max(1));
    let mut step_devs = Vec::with_capacity(trades.len());
    for block in trades.chunks(block_size) {
        let ordering = sequencer.order(&current, block)?;
        let trace = execute_block(&current, block, &ordering, false)?;
        match reference {
            SweepReference::BlockOpen => block_vols.push(volatility(&trace)?.volatility),
            SweepReference::Initial => step_devs.extend(trace.steps.iter().map(|s| step_deviation_sq(pool, s))),
        }
        current = trace.final_pool;
    }
    Ok(match reference {
        SweepReference::BlockOpen => mean(&block_vols),
        SweepReference::Initial => mean(&step_devs),
    })
}

pub fn block_size_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    for &b in &cfg.block_sizes {
        if b == 0 || cfg.total_trades % b != 0 {
            return Err(ClvrError::InvalidConfig(format!(
                "block size {b} does not divide {} trades",
                cfg.total_trades
            )));
        }
    }
    cfg.pool.validate()?;
    let n = cfg.total_trades as u64;
    let per_trial = run_trials(cfg.trials, |t| {
        let spec = cfg
            .workload
            .with_n(cfg.total_trades)
            .with_seed(derive_seed(cfg.seed, &[n, t as u64, LANE_WORKLOAD]));
        let trades = generate_block(&spec)?;
        let seq = cfg.sequencer.reseeded(derive_seed(cfg.seed, &[n, t as u64, LANE_RANDOM]));
        cfg.block_sizes
            .iter()
            .map(|&b| aggregate_volatility(&cfg.pool, &trades, b, seq, cfg.reference))
            .collect::<Result<Vec<f64>>>()
    })?;
    let rows = cfg
        .block_sizes
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let v: Vec<f64> = per_trial.iter().map(|r| r[k]).collect();
            SweepRow {
                block_size: b,
                blocks: cfg.total_trades / b,
                p25: percentile(&v, 25.0),
                median: percentile(&v, 50.0),
                p75: percentile(&v, 75.0),
                mean: mean(&v),
            }
        })
        .collect();
    Ok(SweepTable {
        sequencer: cfg.sequencer.name(),
        total_trades: cfg.total_trades,
        trials: cfg.trials,
        rows,
    })
}
