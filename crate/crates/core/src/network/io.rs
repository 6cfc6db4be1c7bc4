//! `tdgr` text format.
//!
//! ```text
//! tdgr 1 <n> <m> <period_ms>
//! v <id> <lat_udeg> <lon_udeg>
//! a <tail> <head> <k> <dep_1> <tt_1> ... <dep_k> <tt_k>
//! c comment
//! ```

use super::{RoadNetwork, VertexId};
use crate::error::{Error, Result};
use crate::plf::{Breakpoint, Ttf, PERIOD};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub fn load_network(path: impl AsRef<Path>) -> Result<RoadNetwork> {
    parse_network(&fs::read_to_string(path)?)
}

pub fn save_network(net: &RoadNetwork, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_network(net))?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

pub fn parse_network(text: &str) -> Result<RoadNetwork> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = Vec::new();
    let mut coords: Option<Vec<(i32, i32)>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        if kind == "c" {
            continue;
        }
        let Some((n, _)) = header else {
            if kind != "tdgr" {
                return Err(parse_err(line, "expected `tdgr` header"));
            }
            let version: u32 = field(toks.next(), line, "version")?;
            if version != 1 {
                return Err(parse_err(line, format!("unsupported version {version}")));
            }
            let n = field(toks.next(), line, "vertex count")?;
            let m = field(toks.next(), line, "arc count")?;
            let period: f64 = field(toks.next(), line, "period")?;
            if period != PERIOD {
                return Err(parse_err(line, format!("period must be {PERIOD}, got {period}")));
            }
            header = Some((n, m));
            continue;
        };
        match kind {
            "a" => {
                let tail: VertexId = field(toks.next(), line, "tail")?;
                let head: VertexId = field(toks.next(), line, "head")?;
                if tail as usize >= n || head as usize >= n {
                    return Err(parse_err(line, "vertex id out of range"));
                }
                let k: usize = field(toks.next(), line, "breakpoint count")?;
                if k == 0 {
                    return Err(parse_err(line, "arc without breakpoints"));
                }
                let mut points = Vec::with_capacity(k);
                for _ in 0..k {
                    let at = field(toks.next(), line, "departure")?;
                    let val = field(toks.next(), line, "travel time")?;
                    points.push(Breakpoint::new(at, val));
                }
                if toks.next().is_some() {
                    return Err(parse_err(line, "trailing tokens"));
                }
                let ttf = if k == 1 {
                    // a single breakpoint means constant, wherever it sits
                    Ttf::new(vec![Breakpoint::new(0.0, points[0].val)])
                } else {
                    Ttf::new(points)
                };
                let ttf = ttf.map_err(|source| match source {
                    crate::plf::TtfError::Fifo(_) => Error::InvalidArc { tail, head, source },
                    other => parse_err(line, other.to_string()),
                })?;
                arcs.push((tail, head, ttf));
            }
            "v" => {
                let id: usize = field(toks.next(), line, "vertex id")?;
                if id >= n {
                    return Err(parse_err(line, "vertex id out of range"));
                }
                let lat = field(toks.next(), line, "latitude")?;
                let lon = field(toks.next(), line, "longitude")?;
                coords.get_or_insert_with(|| vec![(0, 0); n])[id] = (lat, lon);
            }
            other => return Err(parse_err(line, format!("unknown line type `{other}`"))),
        }
    }

    let (n, m) = header.ok_or_else(|| parse_err(1, "missing `tdgr` header"))?;
    if arcs.len() != m {
        return Err(parse_err(
            text.lines().count(),
            format!("header announces {m} arcs, found {}", arcs.len()),
        ));
    }
    Ok(RoadNetwork::from_arcs(n, arcs, coords))
}

/// Canonical text: header, coordinates by id, arcs in tail-then-head order.
pub fn write_network(net: &RoadNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tdgr 1 {} {} {}", net.vertex_count(), net.arc_count(), PERIOD);
    if let Some(coords) = net.coords() {
        for (v, (lat, lon)) in coords.iter().enumerate() {
            let _ = writeln!(out, "v {v} {lat} {lon}");
        }
    }
    for (tail, head, f) in net.arcs() {
        let _ = write!(out, "a {tail} {head} {}", f.len());
        for p in f.points() {
            // shortest representation that parses back to the same f64
            let _ = write!(out, " {} {}", p.at, p.val);
        }
        out.push('\n');
    }
    out
}
