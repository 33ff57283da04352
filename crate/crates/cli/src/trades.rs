//! Trade lists: CSV files `id,direction,amount_in[,min_amount_out]` or an
//! inline `sell:2,sell:5,buy:10[:min_out]` string with ids assigned 0, 1, ...

use std::io::Read;

use clvr_core::{ClvrError, Direction, Ordering, Trade, TradeId};

use crate::error::CliError;

fn ingest(line: u64, reason: impl Into<String>) -> CliError {
    CliError::Core(ClvrError::Ingest {
        line,
        reason: reason.into(),
    })
}

pub fn read_trades_csv<R: Read>(reader: R) -> Result<Vec<Trade>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| ingest(1, e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if !(names == ["id", "direction", "amount_in"] || names == ["id", "direction", "amount_in", "min_amount_out"]) {
        return Err(ingest(
            1,
            format!("expected header `id,direction,amount_in[,min_amount_out]`, found `{}`", names.join(",")),
        ));
    }

    let mut trades: Vec<Trade> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ingest(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != names.len() {
            return Err(ingest(line, format!("expected {} fields, found {}", names.len(), rec.len())));
        }
        let id: u64 = rec[0].parse().map_err(|_| ingest(line, format!("bad id `{}`", &rec[0])))?;
        let direction: Direction = rec[1]
            .parse()
            .map_err(|_| ingest(line, format!("bad direction `{}`", &rec[1])))?;
        let amount: f64 = rec[2].parse().map_err(|_| ingest(line, format!("bad amount `{}`", &rec[2])))?;
        let mut trade = Trade::new(id, direction, amount).map_err(|e| ingest(line, e.to_string()))?;
        if let Some(m) = rec.get(3).filter(|m| !m.is_empty()) {
            let m: f64 = m.parse().map_err(|_| ingest(line, format!("bad min_amount_out `{m}`")))?;
            trade = trade.with_min_amount_out(m).map_err(|e| ingest(line, e.to_string()))?;
        }
        if trades.iter().any(|t| t.id == trade.id) {
            return Err(ingest(line, format!("duplicate id {id}")));
        }
        trades.push(trade);
    }
    Ok(trades)
}

pub fn parse_inline(spec: &str) -> Result<Vec<Trade>, CliError> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, item)| {
            let bad = || CliError::usage(format!("bad trade `{item}` (expected direction:amount[:min_out])"));
            let parts: Vec<&str> = item.split(':').collect();
            if !(2..=3).contains(&parts.len()) {
                return Err(bad());
            }
            let direction: Direction = parts[0].parse().map_err(|_| bad())?;
            let amount: f64 = parts[1].parse().map_err(|_| bad())?;
            let mut t = Trade::new(i as u64, direction, amount)?;
            if let Some(m) = parts.get(2) {
                t = t.with_min_amount_out(m.parse().map_err(|_| bad())?)?;
            }
            Ok(t)
        })
        .collect()
}

/// Comma-separated trade ids.
pub fn parse_ordering(spec: &str) -> Result<Ordering, CliError> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map(TradeId)
                .map_err(|_| CliError::usage(format!("bad trade id `{s}` in ordering")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Ordering)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_csv_with_optional_min_out() {
        let csv = "id,direction,amount_in,min_amount_out\n3,sell,2,\n7,buy,10,9.5\n";
        let t = read_trades_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].min_amount_out, None);
        assert_eq!(t[1].min_amount_out, Some(9.5));
        assert_eq!(t[1].id, TradeId(7));
    }

    #[test]
    fn reports_offending_line() {
        let csv = "id,direction,amount_in\n0,sell,2\n1,sell,-4\n";
        match read_trades_csv(csv.as_bytes()) {
            Err(CliError::Core(ClvrError::Ingest { line, .. })) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let dup = "id,direction,amount_in\n0,sell,2\n0,buy,4\n";
        assert!(matches!(
            read_trades_csv(dup.as_bytes()),
            Err(CliError::Core(ClvrError::Ingest { line: 3, .. }))
        ));
    }

    #[test]
    fn inline_assigns_ids_in_order() {
        let t = parse_inline("sell:2, sell:5 ,buy:10:9").unwrap();
        assert_eq!(t.iter().map(|t| t.id.0).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(t[2].min_amount_out, Some(9.0));
        assert!(parse_inline("hold:3").is_err());
        assert!(parse_inline("").unwrap().is_empty());
    }
}
