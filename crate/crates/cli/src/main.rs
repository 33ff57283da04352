mod commands;
mod config;
mod error;
mod render;
mod trades;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "clvr", version, about = "Volatility-aware ordering of trades against a constant-product pool")]
struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format: text, json or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PoolArgs {
    #[arg(long)]
    reserve_x: Option<f64>,
    #[arg(long)]
    reserve_y: Option<f64>,
    /// Fee rate in [0, 1).
    #[arg(long)]
    fee: Option<f64>,
}

#[derive(Args, Debug)]
struct TradeInput {
    /// Trades CSV (`id,direction,amount_in[,min_amount_out]`), or `-` for stdin.
    input: Option<PathBuf>,
    /// Inline trades such as `sell:2,sell:5,buy:10`; ids are 0, 1, ...
    #[arg(long, conflicts_with = "input")]
    trades: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order one block with a rule and execute it.
    Sequence {
        #[command(flatten)]
        input: TradeInput,
        /// clvr, vhgsr, gsr, fcfs, random[:seed], brute-force-min, clvr-slippage, ...
        #[arg(long)]
        rule: Option<String>,
        #[command(flatten)]
        pool: PoolArgs,
        /// Fail trades whose output is below their minimum.
        #[arg(long)]
        enforce_slippage: bool,
        #[arg(long)]
        factorial_cap: Option<usize>,
    },
    /// Check a claimed ordering against a rule; exits 1 when it deviates.
    Verify {
        #[command(flatten)]
        input: TradeInput,
        /// Claimed execution order as comma-separated trade ids.
        #[arg(long)]
        claimed: String,
        #[arg(long)]
        rule: Option<String>,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long)]
        factorial_cap: Option<usize>,
    },
    /// Run a simulation: compare, failure_rates, sweep, splitting or conflict.
    Experiment {
        name: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        block_sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        sequencers: Option<Vec<String>>,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        factorial_cap: Option<usize>,
    },
    /// Replay recorded swaps (`block,direction,amount_in,timestamp`) under each rule.
    Replay {
        swaps: PathBuf,
        /// Swaps per block; 0 groups by recorded block number.
        #[arg(long)]
        chunk_size: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sequencers: Option<Vec<String>>,
        #[command(flatten)]
        pool: PoolArgs,
        /// Report absolute volatility only.
        #[arg(long)]
        absolute: bool,
        #[arg(long)]
        factorial_cap: Option<usize>,
    },
}

impl PoolArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.reserve_x = self.reserve_x;
        c.reserve_y = self.reserve_y;
        c.fee = self.fee;
    }
}

fn flags(cli: &Cli) -> RunConfig {
    let mut c = RunConfig {
        seed: cli.seed,
        format: cli.format.clone(),
        out: cli.out.clone(),
        threads: cli.threads,
        ..RunConfig::default()
    };
    match &cli.command {
        Command::Sequence { pool, factorial_cap, .. } | Command::Verify { pool, factorial_cap, .. } => {
            pool.apply(&mut c);
            c.factorial_cap = *factorial_cap;
        }
        Command::Experiment {
            name,
            trials,
            block_sizes,
            sequencers,
            pool,
            tolerance,
            factorial_cap,
        } => {
            pool.apply(&mut c);
            c.experiment = name.clone();
            c.trials = *trials;
            c.block_sizes = block_sizes.clone();
            c.sequencers = sequencers.clone();
            c.tolerance = *tolerance;
            c.factorial_cap = *factorial_cap;
        }
        Command::Replay {
            chunk_size,
            sequencers,
            pool,
            absolute,
            factorial_cap,
            ..
        } => {
            pool.apply(&mut c);
            c.chunk_size = *chunk_size;
            c.sequencers = sequencers.clone();
            c.factorial_cap = *factorial_cap;
            if *absolute {
                c.relative = Some(false);
            }
        }
    }
    c
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cfg = base.overlay(flags(&cli));
    let format = cfg.format()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }

    let mut code = ExitCode::SUCCESS;
    let body = match &cli.command {
        Command::Sequence {
            input,
            rule,
            enforce_slippage,
            ..
        } => {
            let trades = commands::load_trades(input.input.as_deref(), input.trades.as_deref())?;
            let r = commands::sequence(&cfg, &trades, rule.as_deref(), *enforce_slippage)?;
            commands::pick(format, &r, || render::sequence_text(&r), || render::sequence_csv(&r))?
        }
        Command::Verify {
            input, claimed, rule, ..
        } => {
            let trades = commands::load_trades(input.input.as_deref(), input.trades.as_deref())?;
            let claimed = trades::parse_ordering(claimed)?;
            let r = commands::verify(&cfg, &trades, &claimed, rule.as_deref())?;
            if !r.compliant {
                code = ExitCode::from(1);
            }
            commands::pick(format, &r, || render::verify_text(&r), || render::verify_csv(&r))?
        }
        Command::Experiment { .. } => commands::experiment(&cfg)?,
        Command::Replay { swaps, .. } => commands::replay(&cfg, swaps)?,
    };
    emit(cfg.out.as_deref(), &body)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
