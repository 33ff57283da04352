//! Transaction ordering for constant-product AMMs.
//!
//! The crate executes blocks of swaps against a frictionless (or fee-charging)
//! constant-product pool, scores orderings by intra-block price volatility and
//! post-trade inequality, and implements several ordering rules: CLVR, which
//! greedily keeps the price nearest its opening level, the GSR family, random
//! and first-come-first-served baselines, and exhaustive search. The
//! [`experiments`] module reproduces the comparison studies on synthetic and
//! replayed swap streams.

pub mod adversary;
pub mod amm;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod sequencers;
pub mod workload;

pub use amm::{execute_block, execute_trade, spot_price, Direction, ExecutionTrace, Ordering, Pool, Step, Trade, TradeId};
pub use error::{ClvrError, ErrorKind, Result};
pub use metrics::{gini, relative_score, volatility, RelativeScore, VolatilityReport};
pub use sequencers::{Metric, Objective, SequencerKind};
pub use workload::{SizeDistribution, WorkloadSpec};
