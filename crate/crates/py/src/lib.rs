//! Python bindings: pools, trades, ordering rules, execution and metrics.

use std::str::FromStr;

use clvr_core::sequencers::DEFAULT_FACTORIAL_CAP;
use clvr_core::workload::generate_block as core_generate_block;
use clvr_core::{ClvrError, Direction, ErrorKind, Ordering, SequencerKind, TradeId, WorkloadSpec};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: ClvrError) -> PyErr {
    let msg = e.to_string();
    match e.kind() {
        ErrorKind::Validation => PyValueError::new_err(msg),
        ErrorKind::Io => PyOSError::new_err(msg),
        ErrorKind::Tractability => PyRuntimeError::new_err(msg),
        ErrorKind::Numeric => PyArithmeticError::new_err(msg),
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pyclvr")]
#[derive(Clone, Copy)]
pub struct Pool(clvr_core::Pool);

#[pymethods]
impl Pool {
    #[new]
    #[pyo3(signature = (reserve_x, reserve_y, fee=0.0))]
    fn new(reserve_x: f64, reserve_y: f64, fee: f64) -> PyResult<Self> {
        clvr_core::Pool::with_fee(reserve_x, reserve_y, fee).map(Pool).map_err(to_py)
    }

    #[getter]
    fn reserve_x(&self) -> f64 {
        self.0.reserve_x
    }

    #[getter]
    fn reserve_y(&self) -> f64 {
        self.0.reserve_y
    }

    #[getter]
    fn fee(&self) -> f64 {
        self.0.fee_rate
    }

    /// Price of X in Y.
    fn spot_price(&self) -> f64 {
        self.0.spot_price()
    }

    fn __repr__(&self) -> String {
        format!("Pool(reserve_x={}, reserve_y={}, fee={})", self.0.reserve_x, self.0.reserve_y, self.0.fee_rate)
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pyclvr")]
#[derive(Clone)]
pub struct Trade(clvr_core::Trade);

#[pymethods]
impl Trade {
    /// `direction` is `"sell"` (X in) or `"buy"` (Y in).
    #[new]
    #[pyo3(signature = (id, direction, amount_in, min_amount_out=None))]
    fn new(id: u64, direction: &str, amount_in: f64, min_amount_out: Option<f64>) -> PyResult<Self> {
        let direction = Direction::from_str(direction).map_err(PyValueError::new_err)?;
        let mut t = clvr_core::Trade::new(id, direction, amount_in).map_err(to_py)?;
        if let Some(m) = min_amount_out {
            t = t.with_min_amount_out(m).map_err(to_py)?;
        }
        Ok(Trade(t))
    }

    #[getter]
    fn id(&self) -> u64 {
        self.0.id.0
    }

    #[getter]
    fn direction(&self) -> &'static str {
        self.0.direction.as_str()
    }

    #[getter]
    fn amount_in(&self) -> f64 {
        self.0.amount_in
    }

    #[getter]
    fn min_amount_out(&self) -> Option<f64> {
        self.0.min_amount_out
    }

    fn __repr__(&self) -> String {
        format!("Trade(id={}, direction={:?}, amount_in={})", self.0.id.0, self.0.direction.as_str(), self.0.amount_in)
    }
}

#[pyclass(frozen, module = "pyclvr")]
pub struct Step {
    #[pyo3(get)]
    trade_id: u64,
    #[pyo3(get)]
    direction: &'static str,
    #[pyo3(get)]
    amount_in: f64,
    #[pyo3(get)]
    amount_out: f64,
    #[pyo3(get)]
    failed: bool,
    #[pyo3(get)]
    price_after: f64,
}

#[pymethods]
impl Step {
    fn __repr__(&self) -> String {
        format!(
            "Step(trade_id={}, amount_out={}, price_after={}, failed={})",
            self.trade_id,
            self.amount_out,
            self.price_after,
            if self.failed { "True" } else { "False" }
        )
    }
}

fn core_trades(trades: &[PyRef<'_, Trade>]) -> Vec<clvr_core::Trade> {
    trades.iter().map(|t| t.0.clone()).collect()
}

fn ordering(ids: Vec<u64>) -> Ordering {
    Ordering(ids.into_iter().map(TradeId).collect())
}

fn trace(
    pool: &Pool,
    trades: &[PyRef<'_, Trade>],
    order: Vec<u64>,
    enforce_slippage: bool,
) -> PyResult<clvr_core::ExecutionTrace> {
    clvr_core::execute_block(&pool.0, &core_trades(trades), &ordering(order), enforce_slippage).map_err(to_py)
}

/// Trade ids in the order chosen by `rule` (clvr, vhgsr, gsr, fcfs,
/// random[:seed], brute-force-min, brute-force-max, clvr-slippage, ...).
#[pyfunction]
#[pyo3(signature = (pool, trades, rule="clvr", factorial_cap=DEFAULT_FACTORIAL_CAP))]
fn order(pool: &Pool, trades: Vec<PyRef<'_, Trade>>, rule: &str, factorial_cap: usize) -> PyResult<Vec<u64>> {
    let kind = SequencerKind::from_str(rule).map_err(to_py)?;
    let o = kind
        .order_with_cap(&pool.0, &core_trades(&trades), factorial_cap)
        .map_err(to_py)?;
    Ok(o.ids().iter().map(|id| id.0).collect())
}

/// Execution steps for `trades` run in the order of `ordering` (trade ids).
#[pyfunction]
#[pyo3(signature = (pool, trades, ordering, enforce_slippage=false))]
fn execute_block(
    pool: &Pool,
    trades: Vec<PyRef<'_, Trade>>,
    ordering: Vec<u64>,
    enforce_slippage: bool,
) -> PyResult<Vec<Step>> {
    Ok(trace(pool, &trades, ordering, enforce_slippage)?
        .steps
        .into_iter()
        .map(|s| Step {
            trade_id: s.trade_id.0,
            direction: s.direction.as_str(),
            amount_in: s.amount_in,
            amount_out: s.amount_out,
            failed: s.failed,
            price_after: s.price_after,
        })
        .collect())
}

/// Mean squared log deviation of post-trade prices from the opening price.
#[pyfunction]
#[pyo3(signature = (pool, trades, ordering, enforce_slippage=false))]
fn volatility(pool: &Pool, trades: Vec<PyRef<'_, Trade>>, ordering: Vec<u64>, enforce_slippage: bool) -> PyResult<f64> {
    let t = trace(pool, &trades, ordering, enforce_slippage)?;
    clvr_core::volatility(&t).map(|r| r.volatility).map_err(to_py)
}

/// Gini coefficient of post-trade wealth valued at the opening price.
#[pyfunction]
#[pyo3(signature = (pool, trades, ordering, enforce_slippage=false))]
fn gini(pool: &Pool, trades: Vec<PyRef<'_, Trade>>, ordering: Vec<u64>, enforce_slippage: bool) -> PyResult<f64> {
    let t = trace(pool, &trades, ordering, enforce_slippage)?;
    clvr_core::gini(&t, pool.0.spot_price()).map_err(to_py)
}

/// `n` random trades with log-normal sizes and even buy/sell odds.
#[pyfunction]
#[pyo3(signature = (n, seed=0))]
fn generate_block(n: usize, seed: u64) -> PyResult<Vec<Trade>> {
    core_generate_block(&WorkloadSpec::standard(n, seed))
        .map(|v| v.into_iter().map(Trade).collect())
        .map_err(to_py)
}

#[pymodule]
fn pyclvr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pool>()?;
    m.add_class::<Trade>()?;
    m.add_class::<Step>()?;
    m.add_function(wrap_pyfunction!(order, m)?)?;
    m.add_function(wrap_pyfunction!(execute_block, m)?)?;
    m.add_function(wrap_pyfunction!(volatility, m)?)?;
    m.add_function(wrap_pyfunction!(gini, m)?)?;
    m.add_function(wrap_pyfunction!(generate_block, m)?)?;
    Ok(())
}
