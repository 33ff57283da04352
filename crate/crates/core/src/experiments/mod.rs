//! Experiment drivers: rule comparisons, failure rates, block-size sweeps,
//! trade splitting, objective conflict and replay of recorded swaps.
//!
//! Trials run in parallel on the ambient rayon pool. Each trial draws its
//! randomness from a seed derived from `(base seed, block size, trial, lane)`
//! and results are folded in trial order, so reports are identical across
//! thread counts.

pub mod compare;
pub mod conflict;
pub mod failure;
pub mod replay;
pub mod splitting;
pub mod stats;
pub mod sweep;

use rayon::prelude::*;

use crate::amm::Ordering;
use crate::error::Result;

pub use compare::{compare_sequencers, CompareConfig, ComparisonRow, ComparisonTable, SequencerOutcome, TrialResult};
pub use conflict::{objective_conflict, ConflictConfig, ConflictRow, ConflictTable};
pub use failure::{failure_rate_experiment, FailureConfig, FailureRow, FailureTable};
pub use replay::{read_swaps_csv, replay_empirical, BlockGrouping, ReplayConfig, ReplayReport, SwapRecord};
pub use splitting::{splitting_experiment, SplitCell, SplitMode, SplittingConfig, SplittingTable};
pub use stats::{paired_t_test, Alternative};
pub use sweep::{block_size_sweep, SweepConfig, SweepReference, SweepRow, SweepTable};

pub(crate) const LANE_WORKLOAD: u64 = 0;
pub(crate) const LANE_RANDOM: u64 = 1;

/// Relative tolerance under which two volatilities count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub(crate) fn is_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

pub(crate) fn run_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

/// Short stable fingerprint of an ordering (FNV-1a over the ids).
pub fn ordering_digest(ordering: &Ordering) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for id in ordering.ids() {
        for b in id.0.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Renders rows as right-aligned columns under a header.
pub(crate) fn render_columns(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(header[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = line(header);
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

pub(crate) fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(x) => format!("{x:.decimals$}"),
        None => "-".to_string(),
    }
}
