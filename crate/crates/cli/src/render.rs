//! Text and CSV renderings of command results. JSON is plain serde output.

use clvr_core::experiments::{ComparisonTable, ConflictTable, FailureTable, ReplayReport};
use serde::Serialize;

use crate::commands::{SequenceReport, VerifyReport};
use crate::error::CliError;

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::usage(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}

pub fn sequence_text(r: &SequenceReport) -> String {
    let mut out = format!("rule: {}\nordering: {}\n", r.rule, r.ordering);
    if !r.steps.is_empty() {
        out.push_str(&format!(
            "{:>4}  {:>6}  {:>4}  {:>14}  {:>14}  {:>14}  {}\n",
            "step", "id", "dir", "amount_in", "amount_out", "price_after", "status"
        ));
        for (k, s) in r.steps.iter().enumerate() {
            out.push_str(&format!(
                "{:>4}  {:>6}  {:>4}  {:>14.6}  {:>14.6}  {:>14.8}  {}\n",
                k + 1,
                s.trade_id.0,
                s.direction.as_str(),
                s.amount_in,
                s.amount_out,
                s.price_after,
                if s.failed { "failed" } else { "ok" }
            ));
        }
    }
    match r.volatility {
        Some(v) => out.push_str(&format!("volatility: {v:.6e}\n")),
        None => out.push_str("volatility: undefined (empty block)\n"),
    }
    out.push_str(&format!("failures: {}\n", r.failures));
    out
}

pub fn sequence_csv(r: &SequenceReport) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = r
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            vec![
                (k + 1).to_string(),
                s.trade_id.to_string(),
                s.direction.as_str().to_string(),
                format!("{:e}", s.amount_in),
                format!("{:e}", s.amount_out),
                format!("{:e}", s.price_after),
                s.failed.to_string(),
            ]
        })
        .collect();
    csv_rows(
        &["step", "id", "direction", "amount_in", "amount_out", "price_after", "failed"],
        &rows,
    )
}

pub fn verify_text(r: &VerifyReport) -> String {
    match &r.first_deviation {
        None => format!("compliant with {}\n", r.rule),
        Some(d) => format!(
            "not compliant with {}: step {} has trade {} where the rule puts trade {}\nexpected ordering: {}\n",
            r.rule, d.step, d.claimed, d.expected, r.expected_ordering
        ),
    }
}

pub fn verify_csv(r: &VerifyReport) -> Result<String, CliError> {
    let d = r.first_deviation.as_ref();
    csv_rows(
        &["rule", "compliant", "step", "expected", "claimed"],
        &[vec![
            r.rule.clone(),
            r.compliant.to_string(),
            d.map_or(String::new(), |d| d.step.to_string()),
            d.map_or(String::new(), |d| d.expected.to_string()),
            d.map_or(String::new(), |d| d.claimed.to_string()),
        ]],
    )
}

pub fn compare_csv(t: &ComparisonTable) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for r in &t.rows {
        for (k, name) in t.sequencers.iter().enumerate() {
            rows.push(vec![
                r.n.to_string(),
                name.clone(),
                r.trials.to_string(),
                r.wins[k].to_string(),
                r.ties.to_string(),
                format!("{:e}", r.mean_volatility[k]),
                opt(r.mean_relative_volatility.as_ref().map(|v| v[k])),
                opt(r.p_value),
            ]);
        }
    }
    csv_rows(
        &["n", "sequencer", "trials", "wins", "ties", "mean_volatility", "mean_relative_volatility", "p_value"],
        &rows,
    )
}

pub fn failure_csv(t: &FailureTable) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.trials.to_string(),
                format!("{:e}", r.random_pct),
                format!("{:e}", r.vhgsr_pct),
                format!("{:e}", r.clvr_pct),
                format!("{:e}", r.reduction_pct),
            ]
        })
        .collect();
    csv_rows(&["n", "trials", "random_pct", "vhgsr_pct", "clvr_pct", "reduction_pct"], &rows)
}

pub fn conflict_csv(t: &ConflictTable) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.trials.to_string(),
                format!("{:e}", r.rel_gini_volatility_min),
                format!("{:e}", r.rel_gini_volatility_max),
                format!("{:e}", r.rel_volatility_gini_min),
                format!("{:e}", r.rel_volatility_gini_max),
            ]
        })
        .collect();
    csv_rows(
        &[
            "n",
            "trials",
            "rel_gini_volatility_min",
            "rel_gini_volatility_max",
            "rel_volatility_gini_min",
            "rel_volatility_gini_max",
        ],
        &rows,
    )
}

pub fn replay_csv(r: &ReplayReport) -> Result<String, CliError> {
    let mut header = vec!["block".to_string(), "block_number".into(), "swaps".into()];
    header.extend(r.sequencers.iter().map(|s| format!("vol_{s}")));
    header.extend(r.sequencers.iter().map(|s| format!("rel_{s}")));
    header.push("winner".into());
    let rows: Vec<Vec<String>> = r
        .blocks
        .iter()
        .map(|b| {
            let mut row = vec![b.index.to_string(), b.block_number.to_string(), b.swaps.to_string()];
            row.extend(b.volatility.iter().map(|v| format!("{v:e}")));
            for k in 0..r.sequencers.len() {
                row.push(opt(b.relative_volatility.as_ref().map(|v| v[k])));
            }
            row.push(b.winner.map_or(String::new(), |w| r.sequencers[w].clone()));
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_rows(&header, &rows)
}
