//! Binary engine snapshots (little endian).
//!
//! ```text
//! magic "TDCRPSNP", version u32, customized u8
//! network:    n u32, m u32, coords u8, [lat i32, lon i32] * n,
//!             [tail u32, head u32, k u32, [at f64, val f64] * k] * m
//! partition:  levels u32, [cell u32 * n] * levels
//! config:     [epsilon f64] * levels, accelerations u8
//! pool:       per level: slots u32, points u32, slot records, [at f64, val f64] * points
//! ```
//!
//! Vertex ids are the caller's; the ordering and topology are rebuilt on load.
//! The worker count is not stored, so snapshots do not depend on it.

use super::Engine;
use crate::customization::{Accelerations, CustomizationConfig};
use crate::error::{Error, Result};
use crate::network::RoadNetwork;
use crate::overlay::{FunctionPool, LevelPool, Slot};
use crate::partition::MultiLevelPartition;
use crate::plf::{ApproxError, Breakpoint, Ttf};
use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"TDCRPSNP";
const VERSION: u32 = 1;

const UNSET: u8 = 0;
const DIAGONAL: u8 = 1;
const UNREACHABLE: u8 = 2;
const FUNCTION: u8 = 3;

fn bad(msg: impl Into<String>) -> Error {
    Error::Snapshot(msg.into())
}

fn read_err(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        bad("truncated")
    } else {
        Error::Io(e)
    }
}

fn accel_bits(a: &Accelerations) -> u8 {
    let mut copy = *a;
    Accelerations::toggles()
        .iter()
        .enumerate()
        .fold(0, |bits, (i, (_, get))| bits | (u8::from(*get(&mut copy)) << i))
}

fn accel_from_bits(bits: u8) -> Accelerations {
    let mut a = Accelerations::NONE;
    for (i, (_, get)) in Accelerations::toggles().iter().enumerate() {
        *get(&mut a) = bits & (1 << i) != 0;
    }
    a
}

impl Engine {
    pub fn write_snapshot(&self, w: impl Write) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(MAGIC)?;
        w.write_u32::<LE>(VERSION)?;
        w.write_u8(u8::from(self.customized))?;

        let net = self.original_network();
        w.write_u32::<LE>(net.vertex_count() as u32)?;
        w.write_u32::<LE>(net.arc_count() as u32)?;
        match net.coords() {
            Some(coords) => {
                w.write_u8(1)?;
                for &(lat, lon) in coords {
                    w.write_i32::<LE>(lat)?;
                    w.write_i32::<LE>(lon)?;
                }
            }
            None => w.write_u8(0)?,
        }
        for (t, h, f) in net.arcs() {
            w.write_u32::<LE>(t)?;
            w.write_u32::<LE>(h)?;
            w.write_u32::<LE>(f.len() as u32)?;
            for p in f.points() {
                w.write_f64::<LE>(p.at)?;
                w.write_f64::<LE>(p.val)?;
            }
        }

        let p = self.partition();
        w.write_u32::<LE>(p.level_count() as u32)?;
        for l in 1..=p.level_count() {
            for &c in p.cells(l) {
                w.write_u32::<LE>(c)?;
            }
        }

        for e in &self.config.epsilon {
            w.write_f64::<LE>(e.epsilon())?;
        }
        w.write_u8(accel_bits(&self.config.accelerations))?;

        for level in self.pool.levels() {
            w.write_u32::<LE>(level.slots().len() as u32)?;
            w.write_u32::<LE>(level.points().len() as u32)?;
            for s in level.slots() {
                match *s {
                    Slot::Unset => w.write_u8(UNSET)?,
                    Slot::Diagonal => w.write_u8(DIAGONAL)?,
                    Slot::Unreachable => w.write_u8(UNREACHABLE)?,
                    Slot::Function { start, len, min, max } => {
                        w.write_u8(FUNCTION)?;
                        w.write_u32::<LE>(start)?;
                        w.write_u32::<LE>(len)?;
                        w.write_f64::<LE>(min)?;
                        w.write_f64::<LE>(max)?;
                    }
                }
            }
            for p in level.points() {
                w.write_f64::<LE>(p.at)?;
                w.write_f64::<LE>(p.val)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_snapshot(r: impl Read) -> Result<Engine> {
        let mut r = BufReader::new(r);
        read(&mut r).map_err(|e| match e {
            Error::Io(io) => read_err(io),
            other => other,
        })
    }

    pub fn save_snapshot(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_snapshot(File::create(path)?)
    }

    pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Engine> {
        Self::read_snapshot(File::open(path)?)
    }
}

fn read(r: &mut impl Read) -> Result<Engine> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a snapshot"));
    }
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let customized = r.read_u8()? != 0;

    let n = r.read_u32::<LE>()? as usize;
    let m = r.read_u32::<LE>()? as usize;
    let coords = match r.read_u8()? {
        0 => None,
        1 => Some(
            (0..n)
                .map(|_| Ok((r.read_i32::<LE>()?, r.read_i32::<LE>()?)))
                .collect::<Result<Vec<_>>>()?,
        ),
        x => return Err(bad(format!("bad coordinate flag {x}"))),
    };
    let mut arcs = Vec::with_capacity(m);
    for _ in 0..m {
        let (tail, head, k) = (r.read_u32::<LE>()?, r.read_u32::<LE>()?, r.read_u32::<LE>()?);
        if tail as usize >= n || head as usize >= n {
            return Err(bad("arc endpoint out of range"));
        }
        let points = (0..k)
            .map(|_| Ok(Breakpoint::new(r.read_f64::<LE>()?, r.read_f64::<LE>()?)))
            .collect::<Result<Vec<_>>>()?;
        let f = Ttf::new(points).map_err(|source| Error::InvalidArc { tail, head, source })?;
        arcs.push((tail, head, f));
    }
    let net = RoadNetwork::from_arcs(n, arcs, coords);

    let levels = r.read_u32::<LE>()? as usize;
    let cells = (0..levels)
        .map(|_| (0..n).map(|_| Ok(r.read_u32::<LE>()?)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let partition = MultiLevelPartition::from_cells(cells)?;

    let epsilon = (0..levels)
        .map(|_| {
            let e = r.read_f64::<LE>()?;
            ApproxError::new(e).ok_or_else(|| bad(format!("bad epsilon {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let accelerations = accel_from_bits(r.read_u8()?);

    let mut engine = Engine::new(&net, &partition)?;
    let mut pools = Vec::with_capacity(levels);
    for level in 1..=levels {
        let slots = r.read_u32::<LE>()? as usize;
        let points = r.read_u32::<LE>()? as usize;
        if slots != engine.topo.slot_count(level) {
            return Err(bad(format!(
                "level {level}: {slots} slots, topology has {}",
                engine.topo.slot_count(level)
            )));
        }
        let slots = (0..slots)
            .map(|_| {
                Ok(match r.read_u8()? {
                    UNSET => Slot::Unset,
                    DIAGONAL => Slot::Diagonal,
                    UNREACHABLE => Slot::Unreachable,
                    FUNCTION => Slot::Function {
                        start: r.read_u32::<LE>()?,
                        len: r.read_u32::<LE>()?,
                        min: r.read_f64::<LE>()?,
                        max: r.read_f64::<LE>()?,
                    },
                    x => return Err(bad(format!("bad slot tag {x}"))),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let points = (0..points)
            .map(|_| Ok(Breakpoint::new(r.read_f64::<LE>()?, r.read_f64::<LE>()?)))
            .collect::<Result<Vec<_>>>()?;
        pools.push(LevelPool::from_parts(slots, points).ok_or_else(|| bad(format!("level {level}: corrupt pool layout")))?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(bad("trailing bytes"));
    }
    engine.pool = FunctionPool::from_levels(pools);
    engine.config = CustomizationConfig {
        epsilon,
        accelerations,
        workers: 1,
    };
    engine.customized = customized;
    Ok(engine)
}
