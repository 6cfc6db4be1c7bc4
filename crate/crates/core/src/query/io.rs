//! Query batch files (`q <s> <t> <tau_ms>` per line) and result CSV.

use super::QueryResult;
use crate::error::{Error, Result};
use crate::network::{round_ms, VertexId};
use std::fmt::Write as _;
use std::path::Path;

pub const RESULT_HEADER: &str = "s,t,tau,arrival,travel,scanned,relaxed,bps,time_ns";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuerySpec {
    pub source: VertexId,
    pub target: VertexId,
    pub departure_ms: u64,
}

/// Parse a query batch. Blank lines and `c` comment lines are skipped.
pub fn parse_queries(text: &str) -> Result<Vec<QuerySpec>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let mut tok = line.split_whitespace();
        match tok.next() {
            None | Some("c") => continue,
            Some("q") => {}
            Some(other) => return Err(err(format!("unknown record `{other}`"))),
        }
        let fields: Vec<u64> = tok
            .map(|t| t.parse().map_err(|e| err(format!("`{t}`: {e}"))))
            .collect::<Result<_>>()?;
        let [s, t, tau] = fields[..] else {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        };
        if tau >= crate::plf::PERIOD as u64 {
            return Err(err(format!("departure {tau} outside the period")));
        }
        let id = |x: u64| VertexId::try_from(x).map_err(|_| err(format!("vertex id {x} out of range")));
        out.push(QuerySpec {
            source: id(s)?,
            target: id(t)?,
            departure_ms: tau,
        });
    }
    Ok(out)
}

pub fn read_queries(path: impl AsRef<Path>) -> Result<Vec<QuerySpec>> {
    parse_queries(&std::fs::read_to_string(path)?)
}

/// One CSV row per result with its query time; unreachable targets leave
/// arrival and travel empty.
pub fn write_results_csv<'a>(rows: impl IntoIterator<Item = (&'a QueryResult, u64)>) -> String {
    let mut out = format!("{RESULT_HEADER}\n");
    for (r, ns) in rows {
        let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.source,
            r.target,
            round_ms(r.departure),
            opt(r.arrival_ms()),
            opt(r.travel_ms()),
            r.scanned_vertices,
            r.relaxed_arcs,
            r.evaluated_breakpoints,
            ns
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_batch() {
        let q = parse_queries("c demo\nq 1 2 300\n\nq 0 5 0\n").unwrap();
        assert_eq!(
            q,
            vec![
                QuerySpec {
                    source: 1,
                    target: 2,
                    departure_ms: 300
                },
                QuerySpec {
                    source: 0,
                    target: 5,
                    departure_ms: 0
                },
            ]
        );
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse_queries("q 1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_queries("q 1 2 3\nx\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_queries("q 1 2 86400000\n").is_err());
        assert!(parse_queries("q -1 2 5\n").is_err());
    }

    #[test]
    fn csv_rows() {
        let r = QueryResult {
            source: 3,
            target: 4,
            departure: 1000.0,
            arrival: Some(2500.4),
            scanned_vertices: 7,
            relaxed_arcs: 9,
            evaluated_breakpoints: 11,
            path: Vec::new(),
        };
        let none = QueryResult {
            arrival: None,
            ..r.clone()
        };
        let csv = write_results_csv([(&r, 42), (&none, 5)]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(
            lines,
            vec![RESULT_HEADER, "3,4,1000,2500,1500,7,9,11,42", "3,4,1000,,,7,9,11,5"]
        );
    }
}
