//! Replay of recorded swap streams under alternative ordering rules.

use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{mean, paired_t_test, Alternative};
use super::{fmt_opt, is_tie, render_columns};
use crate::amm::{execute_block, Direction, Pool, Trade};
use crate::error::{ClvrError, Result};
use crate::metrics::{relative_to, volatility};
use crate::sequencers::{metric_range, Metric, SequencerKind, DEFAULT_FACTORIAL_CAP};
use crate::workload::derive_seed;

/// Name of the observed (on-chain) ordering in reports.
pub const CURRENT: &str = "current";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapRecord {
    pub block_number: u64,
    pub direction: Direction,
    pub amount_in: f64,
    pub timestamp: i64,
}

/// Reads `block,direction,amount_in,timestamp` CSV. Records must appear in
/// chain order, so block numbers may not decrease.
pub fn read_swaps_csv<R: Read>(reader: R) -> Result<Vec<SwapRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header_err = |reason: String| ClvrError::Ingest { line: 1, reason };
    let headers = rdr.headers().map_err(|e| header_err(e.to_string()))?.clone();
    let expected = ["block", "direction", "amount_in", "timestamp"];
    if headers.len() != expected.len() || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(header_err(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut out: Vec<SwapRecord> = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() + 1;
        let more = rdr.read_record(&mut record).map_err(|e| ClvrError::Ingest {
            line: e.position().map_or(line, |p| p.line()),
            reason: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(line, |p| p.line());
        let bad = |reason: String| ClvrError::Ingest { line, reason };
        let block_number: u64 = record[0]
            .parse()
            .map_err(|_| bad(format!("bad block number `{}`", &record[0])))?;
        let direction: Direction = record[1]
            .parse()
            .map_err(|_| bad(format!("bad direction `{}`", &record[1])))?;
        let amount_in: f64 = record[2]
            .parse()
            .map_err(|_| bad(format!("bad amount `{}`", &record[2])))?;
        if !(amount_in.is_finite() && amount_in > 0.0) {
            return Err(bad(format!("amount must be positive, got {amount_in}")));
        }
        let timestamp: i64 = record[3]
            .parse()
            .map_err(|_| bad(format!("bad timestamp `{}`", &record[3])))?;
        if out.last().is_some_and(|prev| prev.block_number > block_number) {
            return Err(bad(format!("block {block_number} appears after a later block")));
        }
        out.push(SwapRecord {
            block_number,
            direction,
            amount_in,
            timestamp,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockGrouping {
    /// One block per distinct block number.
    Native,
    /// Consecutive runs of this many swaps; the last may be shorter.
    Chunks(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayConfig {
    pub pool: Pool,
    pub grouping: BlockGrouping,
    /// Rules replayed alongside the observed ordering.
    pub sequencers: Vec<SequencerKind>,
    pub factorial_cap: usize,
    /// Enumerate each block to place every rule between its best and worst
    /// ordering. Skipped for blocks above `factorial_cap`.
    pub relative: bool,
    pub seed: u64,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig {
            pool: Pool::new(2_000_000.0, 2_000_000.0).expect("valid"),
            grouping: BlockGrouping::Chunks(10),
            sequencers: vec![SequencerKind::Vhgsr, SequencerKind::Clvr],
            factorial_cap: DEFAULT_FACTORIAL_CAP,
            relative: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayBlock {
    pub index: usize,
    pub block_number: u64,
    pub swaps: usize,
    /// Per rule, observed ordering first.
    pub volatility: Vec<f64>,
    pub relative_volatility: Option<Vec<f64>>,
    pub winner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapCountRow {
    pub swaps: usize,
    pub blocks: usize,
    pub wins: Vec<usize>,
    pub ties: usize,
    pub mean_relative_volatility: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    /// `current` followed by the configured rules.
    pub sequencers: Vec<String>,
    pub swaps: usize,
    pub blocks: Vec<ReplayBlock>,
    pub mean_volatility: Vec<f64>,
    /// `100·(1 − mean_rule / mean_current)`; 0 when the observed stream has
    /// no volatility.
    pub reduction_pct: Vec<f64>,
    pub by_swap_count: Vec<SwapCountRow>,
    /// One-sided paired t-test that CLVR's per-block volatility is below
    /// VHGSR's, when both ran.
    pub p_value: Option<f64>,
}

impl ReplayReport {
    pub fn sequencer_index(&self, name: &str) -> Option<usize> {
        self.sequencers.iter().position(|s| s == name)
    }

    pub fn reduction_of(&self, name: &str) -> Option<f64> {
        self.sequencer_index(name).map(|k| self.reduction_pct[k])
    }

    pub fn to_text(&self) -> String {
        let mut header = vec!["rule".to_string(), "mean_vol".into(), "reduction%".into()];
        header.push("wins".into());
        let wins: Vec<usize> = (0..self.sequencers.len())
            .map(|k| self.blocks.iter().filter(|b| b.winner == Some(k)).count())
            .collect();
        let rows: Vec<Vec<String>> = self
            .sequencers
            .iter()
            .enumerate()
            .map(|(k, s)| {
                vec![
                    s.clone(),
                    format!("{:.4e}", self.mean_volatility[k]),
                    format!("{:.2}", self.reduction_pct[k]),
                    wins[k].to_string(),
                ]
            })
            .collect();
        let mut out = format!("{} swaps in {} blocks\n", self.swaps, self.blocks.len());
        out.push_str(&render_columns(&header, &rows));

        let mut header = vec!["swaps".to_string(), "blocks".into()];
        header.extend(self.sequencers.iter().map(|s| format!("wins:{s}")));
        header.push("tie".into());
        header.extend(self.sequencers.iter().map(|s| format!("rel%:{s}")));
        let rows: Vec<Vec<String>> = self
            .by_swap_count
            .iter()
            .map(|r| {
                let mut cells = vec![r.swaps.to_string(), r.blocks.to_string()];
                cells.extend(r.wins.iter().map(|w| w.to_string()));
                cells.push(r.ties.to_string());
                for k in 0..self.sequencers.len() {
                    cells.push(fmt_opt(r.mean_relative_volatility.as_ref().map(|v| v[k]), 2));
                }
                cells
            })
            .collect();
        out.push('\n');
        out.push_str(&render_columns(&header, &rows));
        out.push_str(&format!("p-value (clvr < vhgsr): {}\n", fmt_opt(self.p_value, 3)));
        out
    }
}

/// Splits records into blocks of trades whose ids are their positions
/// within the block, so id order is the observed order.
pub fn group_blocks(swaps: &[SwapRecord], grouping: BlockGrouping) -> Result<Vec<(u64, Vec<Trade>)>> {
    let to_block = |chunk: &[SwapRecord]| -> Result<(u64, Vec<Trade>)> {
        let trades = chunk
            .iter()
            .enumerate()
            .map(|(i, s)| Trade::new(i as u64, s.direction, s.amount_in))
            .collect::<Result<Vec<_>>>()?;
        Ok((chunk[0].block_number, trades))
    };
    match grouping {
        BlockGrouping::Chunks(0) => Err(ClvrError::InvalidConfig("chunk size must be at least 1".into())),
        BlockGrouping::Chunks(k) => swaps.chunks(k).map(to_block).collect(),
        BlockGrouping::Native => swaps
            .chunk_by(|a, b| a.block_number == b.block_number)
            .map(to_block)
            .collect(),
    }
}

struct Trajectory {
    volatility: Vec<f64>,
    relative: Vec<Option<f64>>,
}

fn run_trajectory(
    cfg: &ReplayConfig,
    blocks: &[(u64, Vec<Trade>)],
    sequencer: SequencerKind,
    rule: usize,
) -> Result<Trajectory> {
    let mut pool = cfg.pool;
    let mut traj = Trajectory {
        volatility: Vec::with_capacity(blocks.len()),
        relative: Vec::with_capacity(blocks.len()),
    };
    for (b, (_, trades)) in blocks.iter().enumerate() {
        let seq = sequencer.reseeded(derive_seed(cfg.seed, &[rule as u64, b as u64]));
        let ordering = seq.order_with_cap(&pool, trades, cfg.factorial_cap)?;
        let trace = execute_block(&pool, trades, &ordering, false)?;
        let vol = volatility(&trace)?.volatility;
        let rel = if cfg.relative && trades.len() <= cfg.factorial_cap {
            let (lo, hi) = metric_range(&pool, trades, Metric::Volatility, cfg.factorial_cap)?;
            Some(relative_to(vol, lo, hi).value_pct)
        } else {
            None
        };
        traj.volatility.push(vol);
        traj.relative.push(rel);
        pool = trace.final_pool;
    }
    Ok(traj)
}

/// Replays `swaps` in their observed order and under each configured rule.
/// Every rule follows its own trajectory: the pool it sees at block `k`
/// results from its own orderings of blocks `0..k`.
pub fn replay_empirical(swaps: &[SwapRecord], cfg: &ReplayConfig) -> Result<ReplayReport> {
    cfg.pool.validate()?;
    if swaps.is_empty() {
        return Err(ClvrError::InvalidConfig("no swaps to replay".into()));
    }
    let blocks = group_blocks(swaps, cfg.grouping)?;
    let rules: Vec<SequencerKind> = std::iter::once(SequencerKind::Fcfs)
        .chain(cfg.sequencers.iter().copied())
        .collect();
    let mut names = vec![CURRENT.to_string()];
    names.extend(cfg.sequencers.iter().map(|s| s.name()));

    let trajectories = rules
        .par_iter()
        .enumerate()
        .map(|(k, &seq)| run_trajectory(cfg, &blocks, seq, k))
        .collect::<Result<Vec<_>>>()?;

    let k = rules.len();
    let report_blocks: Vec<ReplayBlock> = blocks
        .iter()
        .enumerate()
        .map(|(b, (number, trades))| {
            let vols: Vec<f64> = trajectories.iter().map(|t| t.volatility[b]).collect();
            let rel: Option<Vec<f64>> = trajectories.iter().map(|t| t.relative[b]).collect();
            let best = vols.iter().copied().fold(f64::INFINITY, f64::min);
            let at_best: Vec<usize> = (0..k).filter(|&s| is_tie(vols[s], best)).collect();
            ReplayBlock {
                index: b,
                block_number: *number,
                swaps: trades.len(),
                volatility: vols,
                relative_volatility: rel,
                winner: (at_best.len() == 1).then(|| at_best[0]),
            }
        })
        .collect();

    let mean_volatility: Vec<f64> = trajectories.iter().map(|t| mean(&t.volatility)).collect();
    let reduction_pct = mean_volatility
        .iter()
        .map(|&m| {
            let base = mean_volatility[0];
            if base > 0.0 {
                100.0 * (1.0 - m / base)
            } else {
                0.0
            }
        })
        .collect();

    let mut counts: Vec<usize> = report_blocks.iter().map(|b| b.swaps).collect();
    counts.sort_unstable();
    counts.dedup();
    let by_swap_count = counts
        .into_iter()
        .map(|n| {
            let group: Vec<&ReplayBlock> = report_blocks.iter().filter(|b| b.swaps == n).collect();
            let mut wins = vec![0; k];
            let mut ties = 0;
            for b in &group {
                match b.winner {
                    Some(w) => wins[w] += 1,
                    None => ties += 1,
                }
            }
            let mean_relative_volatility = group
                .iter()
                .map(|b| b.relative_volatility.as_ref())
                .collect::<Option<Vec<_>>>()
                .map(|rels| (0..k).map(|s| mean(&rels.iter().map(|r| r[s]).collect::<Vec<_>>())).collect());
            SwapCountRow {
                swaps: n,
                blocks: group.len(),
                wins,
                ties,
                mean_relative_volatility,
            }
        })
        .collect();

    let clvr = rules.iter().position(|s| *s == SequencerKind::Clvr);
    let vhgsr = rules.iter().position(|s| *s == SequencerKind::Vhgsr);
    let p_value = match (clvr, vhgsr) {
        (Some(c), Some(v)) => {
            let diffs: Vec<f64> = trajectories[c]
                .volatility
                .iter()
                .zip(&trajectories[v].volatility)
                .map(|(a, b)| a - b)
                .collect();
            paired_t_test(&diffs, Alternative::Less)
        }
        _ => None,
    };

    Ok(ReplayReport {
        sequencers: names,
        swaps: swaps.len(),
        blocks: report_blocks,
        mean_volatility,
        reduction_pct,
        by_swap_count,
        p_value,
    })
}
