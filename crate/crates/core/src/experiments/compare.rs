//! Head-to-head comparison of ordering rules on synthetic blocks.

use serde::{Deserialize, Serialize};

use super::stats::{mean, paired_t_test, Alternative};
use super::{fmt_opt, is_tie, ordering_digest, render_columns, run_trials, LANE_RANDOM, LANE_WORKLOAD};
use crate::amm::{execute_block, Pool};
use crate::error::{ClvrError, Result};
use crate::metrics::{gini, relative_to, volatility};
use crate::sequencers::{metric_range, Metric, SequencerKind, DEFAULT_FACTORIAL_CAP};
use crate::workload::{derive_seed, WorkloadSpec, DEFAULT_RESERVES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub block_sizes: Vec<usize>,
    pub trials: usize,
    /// Size distribution, direction mix and split factor; `n` and `seed` are
    /// set per trial.
    pub workload: WorkloadSpec,
    pub pool: Pool,
    pub sequencers: Vec<SequencerKind>,
    pub seed: u64,
    pub factorial_cap: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            block_sizes: vec![2, 5, 10],
            trials: 100,
            workload: WorkloadSpec::standard(0, 0),
            pool: Pool::new(DEFAULT_RESERVES, DEFAULT_RESERVES).expect("valid"),
            sequencers: vec![SequencerKind::Clvr, SequencerKind::Vhgsr],
            seed: 0,
            factorial_cap: DEFAULT_FACTORIAL_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequencerOutcome {
    pub sequencer: String,
    pub ordering_digest: String,
    pub volatility: f64,
    /// Position between the block's best (0) and worst (100) ordering;
    /// present only when the block was small enough to enumerate.
    pub relative_volatility: Option<f64>,
    pub failures: usize,
    pub gini: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_id: usize,
    pub outcomes: Vec<SequencerOutcome>,
    /// Index of the sole lowest-volatility sequencer, `None` on a tie.
    pub winner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub trials: usize,
    pub wins: Vec<usize>,
    pub ties: usize,
    pub mean_volatility: Vec<f64>,
    pub mean_relative_volatility: Option<Vec<f64>>,
    /// One-sided paired t-test that CLVR's volatility is below VHGSR's.
    pub p_value: Option<f64>,
    pub trial_results: Vec<TrialResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub sequencers: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, n: usize) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn sequencer_index(&self, name: &str) -> Option<usize> {
        self.sequencers.iter().position(|s| s == name)
    }

    pub fn to_text(&self) -> String {
        let mut header = vec!["n".to_string()];
        header.extend(self.sequencers.iter().map(|s| format!("wins:{s}")));
        header.push("tie".into());
        header.extend(self.sequencers.iter().map(|s| format!("rel%:{s}")));
        header.extend(self.sequencers.iter().map(|s| format!("vol:{s}")));
        header.push("p-value".into());
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.n.to_string()];
                cells.extend(r.wins.iter().map(|w| w.to_string()));
                cells.push(r.ties.to_string());
                for k in 0..self.sequencers.len() {
                    cells.push(fmt_opt(r.mean_relative_volatility.as_ref().map(|v| v[k]), 2));
                }
                cells.extend(r.mean_volatility.iter().map(|v| format!("{v:.3e}")));
                cells.push(fmt_opt(r.p_value, 3));
                cells
            })
            .collect();
        render_columns(&header, &rows)
    }
}

fn run_trial(cfg: &CompareConfig, n: usize, trial: usize) -> Result<TrialResult> {
    let spec = cfg
        .workload
        .with_n(n)
        .with_seed(derive_seed(cfg.seed, &[n as u64, trial as u64, LANE_WORKLOAD]));
    let trades = spec.generate()?;
    let range = if trades.len() <= cfg.factorial_cap {
        Some(metric_range(&cfg.pool, &trades, Metric::Volatility, cfg.factorial_cap)?)
    } else {
        None
    };
    let random_seed = derive_seed(cfg.seed, &[n as u64, trial as u64, LANE_RANDOM]);
    let outcomes = cfg
        .sequencers
        .iter()
        .map(|seq| {
            let ordering = seq
                .reseeded(random_seed)
                .order_with_cap(&cfg.pool, &trades, cfg.factorial_cap)?;
            let trace = execute_block(&cfg.pool, &trades, &ordering, false)?;
            let vol = volatility(&trace)?.volatility;
            Ok(SequencerOutcome {
                sequencer: seq.name(),
                ordering_digest: ordering_digest(&ordering),
                volatility: vol,
                relative_volatility: range.map(|(lo, hi)| relative_to(vol, lo, hi).value_pct),
                failures: trace.failure_count(),
                gini: gini(&trace, cfg.pool.spot_price())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = outcomes
        .iter()
        .map(|o| o.volatility)
        .fold(f64::INFINITY, f64::min);
    let at_best: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| is_tie(o.volatility, best))
        .map(|(k, _)| k)
        .collect();
    Ok(TrialResult {
        trial_id: trial,
        winner: (at_best.len() == 1).then(|| at_best[0]),
        outcomes,
    })
}

/// Runs every sequencer on `trials` fresh blocks per block size.
pub fn compare_sequencers(cfg: &CompareConfig) -> Result<ComparisonTable> {
    if cfg.sequencers.is_empty() {
        return Err(ClvrError::InvalidConfig("no sequencers to compare".into()));
    }
    if cfg.block_sizes.contains(&0) {
        return Err(ClvrError::InvalidConfig("block size must be at least 1".into()));
    }
    cfg.pool.validate()?;
    cfg.workload.validate()?;
    let names: Vec<String> = cfg.sequencers.iter().map(|s| s.name()).collect();
    let clvr = cfg.sequencers.iter().position(|s| *s == SequencerKind::Clvr);
    let vhgsr = cfg.sequencers.iter().position(|s| *s == SequencerKind::Vhgsr);

    let mut rows = Vec::with_capacity(cfg.block_sizes.len());
    for &n in &cfg.block_sizes {
        let results = run_trials(cfg.trials, |t| run_trial(cfg, n, t))?;
        let k = cfg.sequencers.len();
        let mut wins = vec![0; k];
        let mut ties = 0;
        for r in &results {
            match r.winner {
                Some(w) => wins[w] += 1,
                None => ties += 1,
            }
        }
        let column = |s: usize| -> Vec<f64> { results.iter().map(|r| r.outcomes[s].volatility).collect() };
        let mean_volatility = (0..k).map(|s| mean(&column(s))).collect();
        let mean_relative_volatility = results
            .iter()
            .all(|r| r.outcomes.iter().all(|o| o.relative_volatility.is_some()))
            .then(|| {
                (0..k)
                    .map(|s| {
                        let rel: Vec<f64> = results
                            .iter()
                            .filter_map(|r| r.outcomes[s].relative_volatility)
                            .collect();
                        mean(&rel)
                    })
                    .collect()
            })
            .filter(|_| !results.is_empty());
        let p_value = match (clvr, vhgsr) {
            (Some(c), Some(v)) => {
                let diffs: Vec<f64> = column(c).iter().zip(column(v)).map(|(a, b)| a - b).collect();
                paired_t_test(&diffs, Alternative::Less)
            }
            _ => None,
        };
        rows.push(ComparisonRow {
            n,
            trials: cfg.trials,
            wins,
            ties,
            mean_volatility,
            mean_relative_volatility,
            p_value,
            trial_results: results,
        });
    }
    Ok(ComparisonTable { sequencers: names, rows })
}
