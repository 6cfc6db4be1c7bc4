//! `tdu` update files.
//!
//! ```text
//! tdu 1 <count> <now_ms>
//! u <tail> <head> <start_ms> <end_ms> <k> <dep_1> <tt_1> ... <dep_k> <tt_k>
//! ```

use super::{PartialUpdate, UpdateBatch};
use crate::error::{Error, Result};
use crate::plf::Breakpoint;
use std::fmt::Write as _;
use std::path::Path;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

pub fn parse_updates(text: &str) -> Result<UpdateBatch> {
    let mut header: Option<(usize, f64)> = None;
    let mut updates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        if kind == "c" {
            continue;
        }
        if header.is_none() {
            if kind != "tdu" {
                return Err(parse_err(line, "expected `tdu` header"));
            }
            let version: u32 = field(toks.next(), line, "version")?;
            if version != 1 {
                return Err(parse_err(line, format!("unsupported version {version}")));
            }
            header = Some((field(toks.next(), line, "update count")?, field(toks.next(), line, "now")?));
            continue;
        }
        if kind != "u" {
            return Err(parse_err(line, format!("unknown line type `{kind}`")));
        }
        let tail = field(toks.next(), line, "tail")?;
        let head = field(toks.next(), line, "head")?;
        let start = field(toks.next(), line, "horizon start")?;
        let end = field(toks.next(), line, "horizon end")?;
        let k: usize = field(toks.next(), line, "breakpoint count")?;
        let mut points = Vec::with_capacity(k);
        for _ in 0..k {
            let at = field(toks.next(), line, "departure")?;
            points.push(Breakpoint::new(at, field(toks.next(), line, "travel time")?));
        }
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
        let u = PartialUpdate::new(tail, head, start, end, points);
        u.check().map_err(|m| parse_err(line, m))?;
        updates.push(u);
    }
    let (count, now) = header.ok_or_else(|| parse_err(1, "missing `tdu` header"))?;
    if updates.len() != count {
        return Err(parse_err(
            text.lines().count(),
            format!("header announces {count} updates, found {}", updates.len()),
        ));
    }
    Ok(UpdateBatch::new(updates, now))
}

pub fn read_updates(path: impl AsRef<Path>) -> Result<UpdateBatch> {
    parse_updates(&std::fs::read_to_string(path)?)
}

pub fn write_updates(batch: &UpdateBatch) -> String {
    let mut out = format!("tdu 1 {} {}\n", batch.updates.len(), batch.now);
    for u in &batch.updates {
        let _ = write!(out, "u {} {} {} {} {}", u.tail, u.head, u.start, u.end, u.points.len());
        for p in &u.points {
            let _ = write!(out, " {} {}", p.at, p.val);
        }
        out.push('\n');
    }
    out
}
