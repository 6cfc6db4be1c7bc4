//! Profile search from one boundary vertex inside its cell.

use super::Accelerations;
use crate::network::{RoadNetwork, VertexId};
use crate::overlay::{OverlayTopology, SlotValue};
use crate::plf::{link, merge, simulated_merge, Dominance, Ttf};
use crate::queue::MinEntry;
use std::collections::BinaryHeap;

/// Operation counters of cell searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchCounters {
    pub relaxations: u64,
    pub links: u64,
    pub merges: u64,
    pub simulated_merges: u64,
    pub bound_pruned: u64,
    pub post_link_discarded: u64,
    pub replaced: u64,
    pub hopping_skipped: u64,
    pub clique_skipped: u64,
}

impl std::ops::AddAssign for SearchCounters {
    fn add_assign(&mut self, o: Self) {
        self.relaxations += o.relaxations;
        self.links += o.links;
        self.merges += o.merges;
        self.simulated_merges += o.simulated_merges;
        self.bound_pruned += o.bound_pruned;
        self.post_link_discarded += o.post_link_discarded;
        self.replaced += o.replaced;
        self.hopping_skipped += o.hopping_skipped;
        self.clique_skipped += o.clique_skipped;
    }
}

/// Search graph of level `level`: inside a level-1 cell the original arcs,
/// above that the level-(ℓ−1) cliques plus level-(ℓ−1) boundary arcs. Staying
/// inside the cell needs no membership test: every such arc ends in the cell
/// of its tail.
pub(crate) struct LevelGraph<'a> {
    pub net: &'a RoadNetwork,
    pub topo: &'a OverlayTopology,
    pub level: usize,
    /// Level-(ℓ−1) shortcuts by slot; `None` for diagonal or unreachable.
    pub below: &'a [Option<Ttf>],
}

impl<'a> LevelGraph<'a> {
    /// Calls `f(head, function, is_clique_arc)` for every arc out of `u`.
    #[inline]
    fn for_each_arc(&self, u: VertexId, mut f: impl FnMut(VertexId, &'a Ttf, bool)) {
        let inner = self.level - 1;
        if inner >= 1 {
            let (start, heads) = self.topo.row(inner, u);
            for (j, &v) in heads.iter().enumerate() {
                if let Some(g) = &self.below[start as usize + j] {
                    if v != u {
                        f(v, g, true);
                    }
                }
            }
        }
        for a in self.net.out_arcs(u) {
            if self.topo.arc_level(a) == inner {
                f(self.net.head(a), self.net.ttf(a), false);
            }
        }
    }

    /// Calls `f(tail, function)` for every arc into `v`.
    pub fn for_each_in_arc(&self, v: VertexId, mut f: impl FnMut(VertexId, &'a Ttf)) {
        let inner = self.level - 1;
        if inner >= 1 && self.topo.is_boundary(inner, v) {
            let (first, stride, tails) = self.topo.column(inner, v);
            for (i, &u) in tails.iter().enumerate() {
                if let Some(g) = &self.below[(first + i as u32 * stride) as usize] {
                    if u != v {
                        f(u, g);
                    }
                }
            }
        }
        for &a in self.net.in_arcs(v) {
            if self.topo.arc_level(a) == inner {
                f(self.net.tail(a), self.net.ttf(a));
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Label {
    f: Option<Ttf>,
    parent: Option<VertexId>,
    flag: bool,
    queued: bool,
    target: bool,
    seen: bool,
}

/// Reusable per-worker state.
pub(crate) struct CellSearch {
    labels: Vec<Label>,
    touched: Vec<VertexId>,
    heap: BinaryHeap<MinEntry>,
    pub counters: SearchCounters,
}

impl CellSearch {
    pub fn new(n: usize) -> Self {
        CellSearch {
            labels: vec![Label::default(); n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
            counters: SearchCounters::default(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.labels[v as usize] = Label::default();
        }
        self.touched.clear();
        self.heap.clear();
    }

    fn touch(&mut self, v: VertexId) {
        let l = &mut self.labels[v as usize];
        if !l.seen {
            l.seen = true;
            self.touched.push(v);
        }
    }

    /// Profiles from `s` to each of `targets` (the boundary list of its cell),
    /// in target order.
    pub fn run(&mut self, g: &LevelGraph<'_>, s: VertexId, targets: &[VertexId], acc: &Accelerations) -> Vec<SlotValue> {
        self.reset();
        for &t in targets {
            self.touch(t);
            self.labels[t as usize].target = true;
        }
        self.touch(s);
        self.labels[s as usize].f = Some(Ttf::zero());
        self.labels[s as usize].queued = true;
        self.heap.push(MinEntry { key: 0.0, vertex: s });

        let mut unlabeled = targets.iter().filter(|&&t| t != s).count();
        let mut bound = f64::INFINITY;
        let mut bound_dirty = true;

        while let Some(MinEntry { key, vertex: u }) = self.heap.pop() {
            if !self.labels[u as usize].queued {
                continue;
            }
            if unlabeled == 0 {
                if bound_dirty {
                    bound = targets
                        .iter()
                        .filter(|&&t| t != s)
                        .map(|&t| self.labels[t as usize].f.as_ref().map_or(f64::INFINITY, Ttf::max))
                        .fold(f64::NEG_INFINITY, f64::max);
                    bound_dirty = false;
                }
                // no later label can improve any target
                if key >= bound {
                    break;
                }
            }
            self.labels[u as usize].queued = false;
            let lu = &self.labels[u as usize];
            let fu = lu.f.clone().expect("queued vertex has a label");
            let (u_parent, u_flag) = (lu.parent, lu.flag);

            let mut pending: Vec<(VertexId, &Ttf, bool)> = Vec::new();
            g.for_each_arc(u, |v, f, clique| pending.push((v, f, clique)));
            for (v, arc, clique) in pending {
                if acc.clique_flags && clique && u_flag {
                    self.counters.clique_skipped += 1;
                    continue;
                }
                if acc.hopping_reduction && u_parent == Some(v) {
                    self.counters.hopping_skipped += 1;
                    continue;
                }
                self.counters.relaxations += 1;
                let first = self.labels[v as usize].f.is_none();
                if self.relax(u, v, &fu, arc, clique, acc) {
                    let lv = &mut self.labels[v as usize];
                    if lv.target && v != s {
                        bound_dirty = true;
                        if first {
                            unlabeled -= 1;
                        }
                    }
                    lv.queued = true;
                    let key = lv.f.as_ref().unwrap().min();
                    self.heap.push(MinEntry { key, vertex: v });
                }
            }
        }

        targets
            .iter()
            .map(|&t| {
                if t == s {
                    SlotValue::Diagonal
                } else {
                    match &self.labels[t as usize].f {
                        Some(f) => SlotValue::Function(f.clone()),
                        None => SlotValue::Unreachable,
                    }
                }
            })
            .collect()
    }

    /// Relax `u -> v`; `true` if the label of `v` improved.
    fn relax(&mut self, u: VertexId, v: VertexId, fu: &Ttf, arc: &Ttf, clique: bool, acc: &Accelerations) -> bool {
        self.touch(v);
        let c = &mut self.counters;
        let incumbent_max = self.labels[v as usize].f.as_ref().map_or(f64::INFINITY, Ttf::max);
        if acc.bound_pruning && fu.min() + arc.min() > incumbent_max {
            c.bound_pruned += 1;
            return false;
        }
        c.links += 1;
        let tentative = if acc.constant_fast_paths {
            link(fu, arc)
        } else {
            crate::plf::link_sweep(fu, arc)
        };

        let lv = &mut self.labels[v as usize];
        let Some(fv) = &lv.f else {
            lv.f = Some(tentative);
            lv.parent = Some(u);
            lv.flag = clique;
            return true;
        };

        enum Outcome {
            Keep,
            Replace,
            Merge,
        }
        let mut outcome = Outcome::Merge;
        if acc.post_link_bounds {
            if tentative.min() >= fv.max() {
                c.post_link_discarded += 1;
                outcome = Outcome::Keep;
            } else if tentative.max() < fv.min() {
                c.replaced += 1;
                outcome = Outcome::Replace;
            }
        }
        if matches!(outcome, Outcome::Merge) && acc.simulated_merge {
            c.simulated_merges += 1;
            outcome = match simulated_merge(fv, &tentative) {
                Dominance::FDominates => Outcome::Keep,
                Dominance::GDominates => Outcome::Replace,
                Dominance::Crossing => Outcome::Merge,
            };
        }
        match outcome {
            Outcome::Keep => false,
            Outcome::Replace => {
                lv.f = Some(tentative);
                lv.parent = Some(u);
                lv.flag = clique;
                true
            }
            Outcome::Merge => {
                c.merges += 1;
                let m = merge(fv, &tentative);
                match (m.uses_f(), m.uses_g()) {
                    (_, false) => false,
                    (false, true) => {
                        lv.f = Some(m.function);
                        lv.parent = Some(u);
                        lv.flag = clique;
                        true
                    }
                    (true, true) => {
                        lv.f = Some(m.function);
                        lv.parent = None;
                        lv.flag = lv.flag && clique;
                        true
                    }
                }
            }
        }
    }
}
