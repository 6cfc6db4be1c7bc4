//! `mlp` text format: a header `mlp 1 <n> <L>` followed by one line per vertex
//! listing its cells from level 1 to level `L`.

use super::MultiLevelPartition;
use crate::error::{Error, Result};
use crate::network::RoadNetwork;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub fn load_partition(path: impl AsRef<Path>, net: &RoadNetwork) -> Result<MultiLevelPartition> {
    let p = parse_partition(&fs::read_to_string(path)?)?;
    p.validate(net.vertex_count(), None)?;
    Ok(p)
}

pub fn save_partition(p: &MultiLevelPartition, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_partition(p))?;
    Ok(())
}

pub fn parse_partition(text: &str) -> Result<MultiLevelPartition> {
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err(1, "missing `mlp` header".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "mlp" || toks[1] != "1" {
        return Err(err(1, "expected `mlp 1 <n> <L>`".into()));
    }
    let n: usize = toks[2].parse().map_err(|_| err(1, "bad vertex count".into()))?;
    let levels: usize = toks[3].parse().map_err(|_| err(1, "bad level count".into()))?;
    if levels == 0 {
        return Err(err(1, "zero levels".into()));
    }

    let mut cells = vec![Vec::with_capacity(n); levels];
    for (idx, raw) in lines {
        let line = idx + 1;
        let ids: Vec<&str> = raw.split_whitespace().collect();
        if ids.len() != levels {
            return Err(Error::MalformedPartition(format!(
                "line {line}: {} cell ids for {levels} levels",
                ids.len()
            )));
        }
        if cells[0].len() == n {
            return Err(Error::MalformedPartition(format!("line {line}: more than {n} vertices")));
        }
        for (l, tok) in ids.into_iter().enumerate() {
            cells[l].push(tok.parse().map_err(|_| err(line, format!("bad cell id `{tok}`")))?);
        }
    }
    if cells[0].len() != n {
        return Err(Error::MalformedPartition(format!(
            "{} of {n} vertices assigned",
            cells[0].len()
        )));
    }
    MultiLevelPartition::from_cells(cells)
}

pub fn write_partition(p: &MultiLevelPartition) -> String {
    let levels = p.level_count();
    let mut out = String::new();
    let _ = writeln!(out, "mlp 1 {} {levels}", p.vertex_count());
    for v in 0..p.vertex_count() {
        let row: Vec<String> = (1..=levels).map(|l| p.cell(l, v as u32).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
