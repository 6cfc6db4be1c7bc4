//! Live traffic: splice partial functions into arcs, then refresh only the
//! shortcuts whose cells can reach an updated arc within its horizon.

mod io;
mod splice;

pub use io::{parse_updates, read_updates, write_updates};
pub use splice::{splice, PartialUpdate};

use crate::customization::{customize_rows, materialize, CustomizationConfig, LevelGraph, SearchCounters};
use crate::error::{Error, Result};
use crate::network::{ArcId, RoadNetwork, VertexId};
use crate::overlay::{FunctionPool, LevelPool, OverlayTopology, SlotValue};
use crate::plf::{approximate, union_departures, Ttf, EPSILON, PERIOD};
use crate::queue::MaxEntry;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

pub const DEFAULT_SIGNIFICANCE_MS: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateBatch {
    pub updates: Vec<PartialUpdate>,
    /// Current time; departures before it are not refreshed.
    pub now: f64,
    /// Approximated shortcuts are only replaced if they move by more than this.
    pub significance_threshold: f64,
}

impl UpdateBatch {
    pub fn new(updates: Vec<PartialUpdate>, now: f64) -> Self {
        UpdateBatch {
            updates,
            now,
            significance_threshold: DEFAULT_SIGNIFICANCE_MS,
        }
    }
}

/// Boundary vertices of one cell whose shortcuts were recomputed, with their
/// latest departure that still reaches an update in time.
#[derive(Debug, Clone, PartialEq)]
pub struct AffectedCell {
    pub level: usize,
    pub cell: u32,
    pub vertices: Vec<(VertexId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangedShortcut {
    pub level: usize,
    pub from: VertexId,
    pub to: VertexId,
    /// Departure interval at `from` covering the change.
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChangeSet {
    /// Arcs whose function actually changed.
    pub arcs: Vec<ArcId>,
    pub cells: Vec<AffectedCell>,
    pub shortcuts: Vec<ChangedShortcut>,
    pub counters: SearchCounters,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.shortcuts.is_empty()
    }

    /// `level,affected_cells,affected_vertices,changed_shortcuts` per level.
    pub fn to_csv(&self, levels: usize) -> String {
        let mut out = String::from("level,affected_cells,affected_vertices,changed_shortcuts\n");
        for l in 1..=levels {
            let cells = self.cells.iter().filter(|c| c.level == l);
            let vertices: usize = cells.clone().map(|c| c.vertices.len()).sum();
            let changed = self.shortcuts.iter().filter(|s| s.level == l).count();
            let _ = writeln!(out, "{l},{},{vertices},{changed}", cells.count());
        }
        out
    }
}

/// Departure interval where `new` leaves the band `old ± eps·new` by more
/// than `threshold`, widened to the neighbouring breakpoints.
fn significant_change(old: &Ttf, new: &Ttf, eps: f64, threshold: f64) -> Option<(f64, f64)> {
    let xs = union_departures(old, new);
    let a = old.eval_sorted(&xs);
    let b = new.eval_sorted(&xs);
    let off = |i: usize| (a[i] - b[i]).abs() - eps * b[i] > threshold;
    let first = (0..xs.len()).find(|&i| off(i))?;
    let last = (0..xs.len()).rev().find(|&i| off(i)).unwrap();
    let start = if first == 0 { 0.0 } else { xs[first - 1] };
    let end = if last + 1 == xs.len() { PERIOD } else { xs[last + 1] };
    Some((start, end))
}

/// Multi-source latest-departure search backwards over the level graph.
/// Returns the boundary vertices of the graph's level whose latest departure
/// is at least `now`, ascending by id.
fn mark_on_graph(g: &LevelGraph<'_>, seeds: &[(VertexId, f64)], now: f64) -> Vec<(VertexId, f64)> {
    let n = g.net.vertex_count();
    let mut label = vec![f64::NEG_INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(v, d) in seeds {
        if d >= now && d > label[v as usize] {
            label[v as usize] = d;
            heap.push(MaxEntry { key: d, vertex: v });
        }
    }
    let nb = g.topo.boundary_count(g.level) as VertexId;
    let mut marked = Vec::new();
    while let Some(MaxEntry { key, vertex: v }) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        if v < nb {
            marked.push((v, key));
        }
        g.for_each_in_arc(v, |u, f| {
            let dep = f.latest_departure(key);
            if dep >= now && !done[u as usize] && dep > label[u as usize] {
                label[u as usize] = dep;
                heap.push(MaxEntry { key: dep, vertex: u });
            }
        });
    }
    marked.sort_by_key(|&(v, _)| v);
    marked
}

/// Boundary vertices of `level` from which some seed `(tail, deadline)` is
/// reached by its deadline when departing no earlier than `now`. The search
/// runs on the level-`level` cell graphs, so seeds must be tails of arcs or
/// shortcuts of the level below.
pub fn mark_affected(
    net: &RoadNetwork,
    topo: &OverlayTopology,
    pool: &FunctionPool,
    level: usize,
    seeds: &[(VertexId, f64)],
    now: f64,
) -> Vec<(VertexId, f64)> {
    let below = if level > 1 {
        materialize(pool.level(level - 1))
    } else {
        Vec::new()
    };
    let g = LevelGraph {
        net,
        topo,
        level,
        below: &below,
    };
    mark_on_graph(&g, seeds, now)
}

/// Splice every update of `batch`, then refresh the affected shortcuts level
/// by level. Nothing changes if any update is rejected.
pub fn apply_update_batch(
    batch: &UpdateBatch,
    net: &mut RoadNetwork,
    topo: &OverlayTopology,
    pool: &mut FunctionPool,
    cfg: &CustomizationConfig,
) -> Result<ChangeSet> {
    if batch.updates.is_empty() {
        return Err(Error::InvalidUpdate("empty batch".into()));
    }
    // validate and splice everything before touching any state
    let mut spliced: BTreeMap<ArcId, (Ttf, f64)> = BTreeMap::new();
    for u in &batch.updates {
        u.check().map_err(Error::InvalidUpdate)?;
        if batch.now >= u.end {
            return Err(Error::InvalidUpdate(format!(
                "horizon of {} -> {} ends at {}, not after now = {}",
                u.tail, u.head, u.end, batch.now
            )));
        }
        let a = net.find_arc(u.tail, u.head).ok_or(Error::NoSuchArc {
            tail: u.tail,
            head: u.head,
        })?;
        let base = spliced.get(&a).map_or(net.ttf(a), |(f, _)| f);
        let f = splice(base, u).map_err(|source| Error::UpdateRejected {
            tail: u.tail,
            head: u.head,
            source,
        })?;
        let end = spliced.get(&a).map_or(u.end, |&(_, e)| e.max(u.end));
        spliced.insert(a, (f, end));
    }

    let mut changes = ChangeSet::default();
    let mut arc_seeds = Vec::new();
    for (a, (f, end)) in spliced {
        if f.max_abs_diff(net.ttf(a)) > EPSILON {
            net.set_ttf(a, f);
            changes.arcs.push(a);
            arc_seeds.push((a, end));
        }
    }
    let horizon_end = arc_seeds.iter().map(|&(_, e)| e).fold(f64::NEG_INFINITY, f64::max);
    let net = &*net;

    let mut changed_tails: Vec<VertexId> = Vec::new();
    for level in 1..=topo.level_count() {
        let mut seeds: Vec<(VertexId, f64)> = arc_seeds
            .iter()
            .filter(|&&(a, _)| topo.arc_level(a) == level - 1)
            .map(|&(a, e)| (net.tail(a), e))
            .collect();
        seeds.extend(changed_tails.drain(..).map(|u| (u, horizon_end)));
        if seeds.is_empty() {
            continue;
        }
        let below = if level > 1 {
            materialize(pool.level(level - 1))
        } else {
            Vec::new()
        };
        let g = LevelGraph {
            net,
            topo,
            level,
            below: &below,
        };
        let affected = mark_on_graph(&g, &seeds, batch.now);
        if affected.is_empty() {
            continue;
        }
        let mut by_cell: BTreeMap<u32, Vec<(VertexId, f64)>> = BTreeMap::new();
        for &(v, d) in &affected {
            by_cell.entry(topo.cell_of(level, v)).or_default().push((v, d));
        }
        changes.cells.extend(
            by_cell
                .into_iter()
                .map(|(cell, vertices)| AffectedCell { level, cell, vertices }),
        );

        let sources: Vec<VertexId> = affected.iter().map(|&(v, _)| v).collect();
        let (rows, counters) = customize_rows(&g, &sources, cfg);
        changes.counters += counters;

        let eps = cfg.epsilon[level - 1];
        let (band, tolerance) = if eps.is_exact() {
            (0.0, EPSILON)
        } else {
            (eps.epsilon(), batch.significance_threshold)
        };
        let mut values = pool.level(level).values();
        for row in rows {
            let (first, heads) = topo.row(level, row.source);
            for (j, new) in row.values.into_iter().enumerate() {
                let slot = first as usize + j;
                let interval = match (&values[slot], &new) {
                    (SlotValue::Function(old), SlotValue::Function(f)) => significant_change(old, f, band, tolerance),
                    (old, new) if old == new => None,
                    _ => Some((0.0, PERIOD)),
                };
                let Some(interval) = interval else { continue };
                values[slot] = match new {
                    SlotValue::Function(f) if !eps.is_exact() && !f.is_constant() => SlotValue::Function(approximate(&f, eps)),
                    other => other,
                };
                changes.shortcuts.push(ChangedShortcut {
                    level,
                    from: row.source,
                    to: heads[j],
                    interval,
                });
                if changed_tails.last() != Some(&row.source) {
                    changed_tails.push(row.source);
                }
            }
        }
        pool.set_level(level, LevelPool::from_values(values));
    }
    Ok(changes)
}
