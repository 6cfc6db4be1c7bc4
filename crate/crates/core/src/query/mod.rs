//! Earliest-arrival queries on the overlay: original arcs inside the cells of
//! source and target, shortcuts and boundary arcs everywhere else.

mod io;
mod labels;
mod unpack;

pub use io::{parse_queries, read_queries, write_results_csv, QuerySpec, RESULT_HEADER};
pub use labels::QueryLabels;
pub use unpack::{unpack_path, UnpackedPath};

use crate::network::{round_ms, RoadNetwork, VertexId};
use crate::overlay::{FunctionPool, OverlayTopology, Shortcut};
use crate::partition::{MultiLevelPartition, VertexOrdering};
use crate::queue::MinEntry;
use labels::NO_PARENT;
use std::collections::BinaryHeap;

/// Everything a query reads, in reordered ids.
#[derive(Debug, Clone, Copy)]
pub struct QueryGraph<'a> {
    pub net: &'a RoadNetwork,
    pub ord: &'a VertexOrdering,
    pub topo: &'a OverlayTopology,
    pub pool: &'a FunctionPool,
}

impl<'a> QueryGraph<'a> {
    pub fn level_count(&self) -> usize {
        self.topo.level_count()
    }

    /// Cells of `v` on every level, finest first.
    fn cells_of(&self, v: VertexId, out: &mut [u32]) {
        if out.is_empty() {
            return;
        }
        out[0] = if self.topo.is_boundary(1, v) {
            self.topo.cell_of(1, v)
        } else {
            self.ord.cell(1, v)
        };
        for l in 1..out.len() {
            out[l] = self.ord.parent_cell(l, out[l - 1]);
        }
    }
}

/// Highest level on which `a` and `b` lie in different cells, 0 if they share
/// a level-1 cell.
fn uncommon_level(a: &[u32], b: &[u32]) -> usize {
    (0..a.len()).rev().find(|&i| a[i] != b[i]).map_or(0, |i| i + 1)
}

/// Level on which a query from `s` to `t` scans `v`.
pub fn search_level(p: &MultiLevelPartition, s: VertexId, t: VertexId, v: VertexId) -> usize {
    let cells = |x| (1..=p.level_count()).map(|l| p.cell(l, x)).collect::<Vec<_>>();
    let (cs, ct, cv) = (cells(s), cells(t), cells(v));
    uncommon_level(&cs, &cv).min(uncommon_level(&cv, &ct))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryConfig {
    /// Clique flags apply to shortcuts of this many top levels.
    pub clique_flag_top_k: usize,
    /// Skip arcs whose lower bound cannot improve the head.
    pub bound_pruning: bool,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig {
            clique_flag_top_k: 2,
            bound_pruning: true,
        }
    }
}

impl QueryConfig {
    pub const PLAIN: QueryConfig = QueryConfig {
        clique_flag_top_k: 0,
        bound_pruning: false,
    };
}

/// Vertex on a query path together with the level of the arc that reached it
/// (0 for an original arc) and the arrival time there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub vertex: VertexId,
    pub level: usize,
    pub arrival: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub source: VertexId,
    pub target: VertexId,
    pub departure: f64,
    pub arrival: Option<f64>,
    /// Vertices settled.
    pub scanned_vertices: usize,
    /// Arcs inspected.
    pub relaxed_arcs: usize,
    /// Breakpoints inspected by function evaluations.
    pub evaluated_breakpoints: u64,
    /// Overlay path, source first; empty if the target is unreachable.
    pub path: Vec<Hop>,
}

impl QueryResult {
    pub fn arrival_ms(&self) -> Option<i64> {
        self.arrival.map(round_ms)
    }

    pub fn travel_ms(&self) -> Option<i64> {
        self.arrival.map(|a| round_ms(a) - round_ms(self.departure))
    }
}

/// Reusable query state.
pub struct Query<'a> {
    g: QueryGraph<'a>,
    cfg: QueryConfig,
    labels: QueryLabels,
    heap: BinaryHeap<MinEntry>,
    cells: [Vec<u32>; 3],
}

impl<'a> Query<'a> {
    pub fn new(g: QueryGraph<'a>, cfg: QueryConfig) -> Self {
        let levels = g.level_count();
        Query {
            labels: QueryLabels::new(g.ord, g.topo),
            g,
            cfg,
            heap: BinaryHeap::new(),
            cells: [vec![0; levels], vec![0; levels], vec![0; levels]],
        }
    }

    pub fn labels(&self) -> &QueryLabels {
        &self.labels
    }

    /// Earliest arrival at `t` departing from `s` at `tau`.
    pub fn run(&mut self, s: VertexId, t: VertexId, tau: f64) -> QueryResult {
        let g = self.g;
        let levels = g.level_count();
        let flag_from = levels + 1 - self.cfg.clique_flag_top_k.min(levels);
        let [cs, ct, cv] = &mut self.cells;
        g.cells_of(s, cs);
        g.cells_of(t, ct);
        let interior = |c: &[u32]| if levels == 0 { 0..0 } else { g.ord.interior_range(c[0]) };
        let (si, ti) = (interior(cs), interior(ct));
        self.labels.activate(si.clone(), if si == ti { 0..0 } else { ti });

        let mut res = QueryResult {
            source: s,
            target: t,
            departure: tau,
            arrival: None,
            scanned_vertices: 0,
            relaxed_arcs: 0,
            evaluated_breakpoints: 0,
            path: Vec::new(),
        };
        let lab = &mut self.labels;
        let is = lab.index(s);
        lab.arrival[is] = tau;
        lab.note(s, g.topo);
        self.heap.clear();
        self.heap.push(MinEntry { key: tau, vertex: s });

        while let Some(MinEntry { key: d, vertex: u }) = self.heap.pop() {
            let iu = lab.index(u);
            if lab.done[iu] {
                continue;
            }
            lab.done[iu] = true;
            res.scanned_vertices += 1;
            if u == t {
                res.arrival = Some(d);
                break;
            }
            let level = if levels == 0 {
                0
            } else {
                g.cells_of(u, cv);
                uncommon_level(cs, cv).min(uncommon_level(cv, ct))
            };
            let skip_cliques = lab.flag[iu];
            let mut relax = |v: VertexId, arrive: &mut dyn FnMut(&mut u64) -> f64, min: f64, via: usize, clique: bool| {
                res.relaxed_arcs += 1;
                let iv = lab.index(v);
                if lab.done[iv] || (self.cfg.bound_pruning && d + min >= lab.arrival[iv]) {
                    return;
                }
                let a = d + arrive(&mut res.evaluated_breakpoints);
                if a < lab.arrival[iv] {
                    lab.arrival[iv] = a;
                    lab.parent[iv] = u;
                    lab.parent_level[iv] = via as u8;
                    lab.flag[iv] = clique && via >= flag_from;
                    lab.note(v, g.topo);
                    self.heap.push(MinEntry { key: a, vertex: v });
                }
            };
            if level >= 1 {
                debug_assert!(g.topo.is_boundary(level, u));
                if !skip_cliques {
                    let (start, heads) = g.topo.row(level, u);
                    let pool = g.pool.level(level);
                    for (j, &v) in heads.iter().enumerate() {
                        if v == u {
                            continue;
                        }
                        match pool.get(crate::overlay::FunctionRef(start + j as u32)) {
                            Some(sc @ Shortcut::Function(_)) => {
                                relax(v, &mut |bps| sc.eval_counted(d, bps), sc.min(), level, true)
                            }
                            Some(_) => {}
                            None => panic!("level {level} is not customized"),
                        }
                    }
                }
            }
            for a in g.net.out_arcs(u) {
                if g.topo.arc_level(a) >= level {
                    let f = g.net.ttf(a);
                    relax(g.net.head(a), &mut |bps| f.eval_counted(d, bps), f.min(), 0, false);
                }
            }
        }

        if let Some(a) = res.arrival {
            let mut path = Vec::new();
            let mut i = lab.index(t);
            let mut arrival = a;
            loop {
                let v = lab.vertex(i);
                path.push(Hop {
                    vertex: v,
                    level: lab.parent_level[i] as usize,
                    arrival,
                });
                if lab.parent[i] == NO_PARENT {
                    break;
                }
                i = lab.index(lab.parent[i]);
                arrival = lab.arrival[i];
            }
            path.reverse();
            res.path = path;
        }
        lab.reset(g.ord);
        res
    }
}

#[cfg(test)]
mod tests;
