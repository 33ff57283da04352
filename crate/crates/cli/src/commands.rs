use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use clvr_core::experiments::{
    block_size_sweep, compare_sequencers, failure_rate_experiment, objective_conflict, read_swaps_csv,
    replay_empirical, splitting_experiment,
};
use clvr_core::sequencers::DEFAULT_FACTORIAL_CAP;
use clvr_core::{execute_block, volatility, Ordering, Pool, SequencerKind, Step, Trade, TradeId};
use serde::Serialize;

use crate::config::{Experiment, Format, RunConfig};
use crate::error::CliError;
use crate::render;
use crate::trades::{parse_inline, read_trades_csv};

/// Reserve used by `sequence` and `verify` when none is configured.
pub const DEFAULT_RESERVE: f64 = 2e6;

#[derive(Debug, Serialize)]
pub struct SequenceReport {
    pub rule: String,
    pub pool: Pool,
    pub ordering: Ordering,
    pub steps: Vec<Step>,
    pub volatility: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Serialize)]
pub struct Deviation {
    pub step: usize,
    pub expected: TradeId,
    pub claimed: TradeId,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub rule: String,
    pub compliant: bool,
    pub claimed_ordering: Ordering,
    pub expected_ordering: Ordering,
    pub first_deviation: Option<Deviation>,
}

pub fn load_trades(input: Option<&Path>, inline: Option<&str>) -> Result<Vec<Trade>, CliError> {
    match (input, inline) {
        (_, Some(spec)) => parse_inline(spec),
        (Some(p), None) if p.as_os_str() == "-" => read_trades_csv(std::io::stdin().lock()),
        (Some(p), None) => read_trades_csv(File::open(p).map_err(|e| CliError::io(p, e))?),
        (None, None) => Err(CliError::usage("give a trades CSV file or --trades")),
    }
}

fn rule(cfg: &RunConfig, flag: Option<&str>) -> Result<SequencerKind, CliError> {
    let name = flag.or(cfg.sequencer.as_deref()).unwrap_or("clvr");
    let kind = SequencerKind::from_str(name)?;
    Ok(if name.contains(':') { kind } else { kind.reseeded(cfg.seed()) })
}

fn cap(cfg: &RunConfig) -> usize {
    cfg.factorial_cap.unwrap_or(DEFAULT_FACTORIAL_CAP)
}

pub fn sequence(
    cfg: &RunConfig,
    trades: &[Trade],
    rule_flag: Option<&str>,
    enforce_slippage: bool,
) -> Result<SequenceReport, CliError> {
    let pool = cfg.pool(DEFAULT_RESERVE)?;
    let kind = rule(cfg, rule_flag)?;
    let enforce = enforce_slippage
        || matches!(kind, SequencerKind::ClvrSlippageAware | SequencerKind::VhgsrSlippageAware);
    let ordering = kind.order_with_cap(&pool, trades, cap(cfg))?;
    let trace = execute_block(&pool, trades, &ordering, enforce)?;
    let vol = if trace.is_empty() { None } else { Some(volatility(&trace)?.volatility) };
    Ok(SequenceReport {
        rule: kind.name(),
        pool,
        ordering,
        failures: trace.failure_count(),
        steps: trace.steps,
        volatility: vol,
    })
}

pub fn verify(
    cfg: &RunConfig,
    trades: &[Trade],
    claimed: &Ordering,
    rule_flag: Option<&str>,
) -> Result<VerifyReport, CliError> {
    let pool = cfg.pool(DEFAULT_RESERVE)?;
    let kind = rule(cfg, rule_flag)?;
    claimed.to_indices(trades)?;
    let expected = kind.order_with_cap(&pool, trades, cap(cfg))?;
    let first_deviation = expected
        .ids()
        .iter()
        .zip(claimed.ids())
        .position(|(a, b)| a != b)
        .map(|k| Deviation {
            step: k + 1,
            expected: expected.ids()[k],
            claimed: claimed.ids()[k],
        });
    Ok(VerifyReport {
        rule: kind.name(),
        compliant: first_deviation.is_none(),
        claimed_ordering: claimed.clone(),
        expected_ordering: expected,
        first_deviation,
    })
}

pub fn experiment(cfg: &RunConfig) -> Result<String, CliError> {
    let name = cfg
        .experiment
        .as_deref()
        .ok_or_else(|| CliError::usage("no experiment named (compare, failure_rates, sweep, splitting, conflict)"))?;
    let format = cfg.format()?;
    Ok(match Experiment::from_str(name)? {
        Experiment::Compare => {
            let t = compare_sequencers(&cfg.compare()?)?;
            pick(format, &t, || t.to_text(), || render::compare_csv(&t))?
        }
        Experiment::FailureRates => {
            let t = failure_rate_experiment(&cfg.failure()?)?;
            pick(format, &t, || t.to_text(), || render::failure_csv(&t))?
        }
        Experiment::Sweep => {
            let t = block_size_sweep(&cfg.sweep()?)?;
            pick(format, &t, || t.to_text(), || Ok(t.to_csv()))?
        }
        Experiment::Splitting => {
            let t = splitting_experiment(&cfg.splitting()?)?;
            pick(format, &t, || t.to_text(), || Ok(t.to_csv()))?
        }
        Experiment::Conflict => {
            let t = objective_conflict(&cfg.conflict()?)?;
            pick(format, &t, || t.to_text(), || render::conflict_csv(&t))?
        }
    })
}

pub fn replay(cfg: &RunConfig, swaps_path: &Path) -> Result<String, CliError> {
    let file = File::open(swaps_path).map_err(|e| CliError::io(swaps_path, e))?;
    let swaps = read_swaps_csv(file)?;
    let report = replay_empirical(&swaps, &cfg.replay()?)?;
    pick(cfg.format()?, &report, || report.to_text(), || render::replay_csv(&report))
}

pub fn pick<T: Serialize>(
    format: Format,
    value: &T,
    text: impl FnOnce() -> String,
    csv: impl FnOnce() -> Result<String, CliError>,
) -> Result<String, CliError> {
    match format {
        Format::Json => render::json(value),
        Format::Text => Ok(text()),
        Format::Csv => csv(),
    }
}
