//! Flat key-value run configuration. A TOML file supplies the base values and
//! command-line flags override them key by key.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clvr_core::experiments::{
    BlockGrouping, CompareConfig, ConflictConfig, FailureConfig, ReplayConfig, SplitMode, SplittingConfig,
    SweepConfig, SweepReference,
};
use clvr_core::workload::{DEFAULT_LOG_MU, DEFAULT_LOG_SIGMA};
use clvr_core::{Pool, SequencerKind, SizeDistribution, WorkloadSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,

    pub reserve_x: Option<f64>,
    pub reserve_y: Option<f64>,
    pub fee: Option<f64>,

    pub trials: Option<usize>,
    pub block_sizes: Option<Vec<usize>>,
    pub sequencers: Option<Vec<String>>,
    pub factorial_cap: Option<usize>,

    /// `lognormal` or `uniform`.
    pub size_distribution: Option<String>,
    pub log_mu: Option<f64>,
    pub log_sigma: Option<f64>,
    pub uniform_lo: Option<f64>,
    pub uniform_hi: Option<f64>,
    pub buy_probability: Option<f64>,
    pub split_factor: Option<usize>,

    /// Slippage tolerance for failure rates.
    pub tolerance: Option<f64>,

    /// Block-size sweep: stream length, rule, and `initial` / `block_open`.
    pub total_trades: Option<usize>,
    pub sequencer: Option<String>,
    pub reference: Option<String>,

    /// Splitting: `one_splits` / `all_split`.
    pub split_mode: Option<String>,
    pub trade_sizes: Option<Vec<f64>>,
    pub split_factors: Option<Vec<usize>>,
    pub background_trades: Option<usize>,

    /// Replay: fixed chunk size; absent or 0 groups by block number.
    pub chunk_size: Option<usize>,
    pub relative: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Compare,
    FailureRates,
    Sweep,
    Splitting,
    Conflict,
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "compare" => Experiment::Compare,
            "failure_rates" | "failure" | "failures" => Experiment::FailureRates,
            "sweep" | "block_size_sweep" => Experiment::Sweep,
            "splitting" | "split" => Experiment::Splitting,
            "conflict" | "objective_conflict" => Experiment::Conflict,
            _ => return Err(CliError::usage(format!("unknown experiment `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "text" | "txt" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            _ => Err(CliError::usage(format!("unknown format `{s}` (json, text, csv)"))),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    /// Values set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> Self {
        let mut base = serde_json::to_value(self).expect("config serializes");
        let over = serde_json::to_value(over).expect("config serializes");
        if let (Some(b), Some(o)) = (base.as_object_mut(), over.as_object()) {
            for (k, v) in o {
                if !v.is_null() {
                    b.insert(k.clone(), v.clone());
                }
            }
        }
        serde_json::from_value(base).expect("merged config deserializes")
    }

    pub fn format(&self) -> Result<Format, CliError> {
        self.format.as_deref().map_or(Ok(Format::Text), Format::from_str)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn pool(&self, default_reserve: f64) -> Result<Pool, CliError> {
        Ok(Pool::with_fee(
            self.reserve_x.unwrap_or(default_reserve),
            self.reserve_y.unwrap_or(default_reserve),
            self.fee.unwrap_or(0.0),
        )?)
    }

    fn sequencer_list(&self) -> Result<Option<Vec<SequencerKind>>, CliError> {
        self.sequencers
            .as_ref()
            .map(|v| v.iter().map(|s| SequencerKind::from_str(s).map_err(CliError::from)).collect())
            .transpose()
    }

    pub fn workload(&self) -> Result<WorkloadSpec, CliError> {
        let mut w = WorkloadSpec::standard(0, 0);
        w.size_distribution = match self.size_distribution.as_deref().map(str::to_ascii_lowercase).as_deref() {
            None | Some("lognormal") | Some("log_normal") | Some("log-normal") => {
                SizeDistribution::LogNormal {
                    mu: self.log_mu.unwrap_or(DEFAULT_LOG_MU),
                    sigma: self.log_sigma.unwrap_or(DEFAULT_LOG_SIGMA),
                }
            }
            Some("uniform") => SizeDistribution::Uniform {
                lo: self.uniform_lo.ok_or_else(|| CliError::usage("uniform sizes need uniform_lo"))?,
                hi: self.uniform_hi.ok_or_else(|| CliError::usage("uniform sizes need uniform_hi"))?,
            },
            Some(other) => return Err(CliError::usage(format!("unknown size distribution `{other}`"))),
        };
        if let Some(p) = self.buy_probability {
            w.buy_probability = p;
        }
        if let Some(k) = self.split_factor {
            w.split_factor = k;
        }
        w.validate()?;
        Ok(w)
    }

    pub fn compare(&self) -> Result<CompareConfig, CliError> {
        let d = CompareConfig::default();
        Ok(CompareConfig {
            block_sizes: self.block_sizes.clone().unwrap_or(d.block_sizes),
            trials: self.trials.unwrap_or(d.trials),
            workload: self.workload()?,
            pool: self.pool(d.pool.reserve_x)?,
            sequencers: self.sequencer_list()?.unwrap_or(d.sequencers),
            seed: self.seed(),
            factorial_cap: self.factorial_cap.unwrap_or(d.factorial_cap),
        })
    }

    pub fn failure(&self) -> Result<FailureConfig, CliError> {
        let d = FailureConfig::default();
        Ok(FailureConfig {
            block_sizes: self.block_sizes.clone().unwrap_or(d.block_sizes),
            trials: self.trials.unwrap_or(d.trials),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            workload: self.workload()?,
            pool: self.pool(d.pool.reserve_x)?,
            seed: self.seed(),
        })
    }

    pub fn sweep(&self) -> Result<SweepConfig, CliError> {
        let d = SweepConfig::default();
        let reference = match self.reference.as_deref() {
            None => d.reference,
            Some("initial") => SweepReference::Initial,
            Some("block_open") | Some("block-open") => SweepReference::BlockOpen,
            Some(other) => return Err(CliError::usage(format!("unknown sweep reference `{other}`"))),
        };
        Ok(SweepConfig {
            total_trades: self.total_trades.unwrap_or(d.total_trades),
            block_sizes: self.block_sizes.clone().unwrap_or(d.block_sizes),
            trials: self.trials.unwrap_or(d.trials),
            sequencer: self.sequencer.as_deref().map(SequencerKind::from_str).transpose()?.unwrap_or(d.sequencer),
            reference,
            workload: self.workload()?,
            pool: self.pool(d.pool.reserve_x)?,
            seed: self.seed(),
        })
    }

    pub fn splitting(&self) -> Result<SplittingConfig, CliError> {
        let d = SplittingConfig::default();
        let mode = match self.split_mode.as_deref() {
            None => d.mode,
            Some("one_splits") | Some("one-splits") | Some("one") => SplitMode::OneSplits,
            Some("all_split") | Some("all-split") | Some("all") => SplitMode::AllSplit,
            Some(other) => return Err(CliError::usage(format!("unknown split mode `{other}`"))),
        };
        let background = match mode {
            SplitMode::OneSplits => d.background_trades,
            SplitMode::AllSplit => d.background_trades + 1,
        };
        Ok(SplittingConfig {
            mode,
            trade_sizes: self.trade_sizes.clone().unwrap_or(d.trade_sizes),
            split_factors: self.split_factors.clone().unwrap_or(d.split_factors),
            trials: self.trials.unwrap_or(d.trials),
            background_trades: self.background_trades.unwrap_or(background),
            workload: self.workload()?,
            pool: self.pool(d.pool.reserve_x)?,
            seed: self.seed(),
        })
    }

    pub fn conflict(&self) -> Result<ConflictConfig, CliError> {
        let d = ConflictConfig::default();
        Ok(ConflictConfig {
            block_sizes: self.block_sizes.clone().unwrap_or(d.block_sizes),
            trials: self.trials.unwrap_or(d.trials),
            workload: self.workload()?,
            pool: self.pool(d.pool.reserve_x)?,
            seed: self.seed(),
            factorial_cap: self.factorial_cap.unwrap_or(d.factorial_cap),
        })
    }

    pub fn replay(&self) -> Result<ReplayConfig, CliError> {
        let d = ReplayConfig::default();
        Ok(ReplayConfig {
            pool: self.pool(d.pool.reserve_x)?,
            grouping: match self.chunk_size {
                None | Some(0) => BlockGrouping::Native,
                Some(k) => BlockGrouping::Chunks(k),
            },
            sequencers: self.sequencer_list()?.unwrap_or(d.sequencers),
            factorial_cap: self.factorial_cap.unwrap_or(d.factorial_cap),
            relative: self.relative.unwrap_or(d.relative),
            seed: self.seed(),
        })
    }
}
