//! Expansion of overlay paths into original arcs.

use super::{Hop, QueryGraph, QueryResult};
use crate::error::{Error, Result};
use crate::network::{round_ms, ArcId, VertexId};
use crate::overlay::{FunctionRef, Shortcut};
use crate::queue::MinEntry;
use std::collections::{BinaryHeap, HashMap};

#[derive(Debug, Clone, PartialEq)]
pub struct UnpackedPath {
    /// Vertices from source to target.
    pub vertices: Vec<VertexId>,
    pub arcs: Vec<ArcId>,
    /// Arrival obtained by evaluating the original arcs along the path.
    pub arrival: f64,
}

/// Expand the overlay path of `res` into original arcs. With `strict`, the
/// arrival along the expanded path must round to the reported arrival.
/// Returns `None` for an unreachable target.
pub fn unpack_path(g: QueryGraph<'_>, res: &QueryResult, strict: bool) -> Result<Option<UnpackedPath>> {
    let Some(reported) = res.arrival else {
        return Ok(None);
    };
    let mut arcs = Vec::new();
    for w in res.path.windows(2) {
        expand(g, w[0].vertex, w[1].vertex, w[1].level, w[0].arrival, &mut arcs);
    }
    let mut vertices = vec![res.source];
    let mut t = res.departure;
    for &a in &arcs {
        t += g.net.ttf(a).eval(t);
        vertices.push(g.net.head(a));
    }
    if strict && round_ms(t) != round_ms(reported) {
        return Err(Error::PathMismatch {
            expected: reported,
            actual: t,
        });
    }
    Ok(Some(UnpackedPath {
        vertices,
        arcs,
        arrival: t,
    }))
}

/// Append the original arcs of the level-`level` hop `u -> v` departing at `at`.
fn expand(g: QueryGraph<'_>, u: VertexId, v: VertexId, level: usize, at: f64, arcs: &mut Vec<ArcId>) {
    if level == 0 {
        let a = g
            .net
            .out_arcs(u)
            .filter(|&a| g.net.head(a) == v)
            .min_by(|&a, &b| g.net.ttf(a).eval(at).total_cmp(&g.net.ttf(b).eval(at)))
            .expect("hop follows an original arc");
        arcs.push(a);
        return;
    }
    // earliest arrival on the level-(ℓ−1) graph of the cell
    let inner = level - 1;
    let mut label: HashMap<VertexId, (f64, Option<(VertexId, usize)>)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    label.insert(u, (at, None));
    heap.push(MinEntry { key: at, vertex: u });
    let mut done = std::collections::HashSet::new();
    while let Some(MinEntry { key: d, vertex: x }) = heap.pop() {
        if !done.insert(x) {
            continue;
        }
        if x == v {
            break;
        }
        let mut relax = |y: VertexId, a: f64, via: usize| {
            let e = label.entry(y).or_insert((f64::INFINITY, None));
            if a < e.0 {
                *e = (a, Some((x, via)));
                heap.push(MinEntry { key: a, vertex: y });
            }
        };
        if inner >= 1 {
            let (start, heads) = g.topo.row(inner, x);
            let pool = g.pool.level(inner);
            for (j, &y) in heads.iter().enumerate() {
                if let Some(Shortcut::Function(f)) = pool.get(FunctionRef(start + j as u32)) {
                    relax(y, d + f.eval(d), inner);
                }
            }
        }
        for a in g.net.out_arcs(x) {
            if g.topo.arc_level(a) == inner {
                relax(g.net.head(a), d + g.net.ttf(a).eval(d), 0);
            }
        }
    }
    let mut hops = Vec::new();
    let mut cur = v;
    while let Some(&(arrival, parent)) = label.get(&cur) {
        let Some((p, via)) = parent else { break };
        hops.push((
            p,
            Hop {
                vertex: cur,
                level: via,
                arrival,
            },
        ));
        cur = p;
    }
    assert_eq!(cur, u, "shortcut {u} -> {v} on level {level} has no path in its cell");
    hops.reverse();
    for (p, hop) in hops {
        let dep = label[&p].0;
        expand(g, p, hop.vertex, hop.level, dep, arcs);
    }
}
