//! Reference searches: time-dependent Dijkstra, profile search and
//! latest-departure search.

use super::{ArcId, RoadNetwork, VertexId};
use crate::plf::{link, merge, Ttf};
use crate::queue::{MaxEntry, MinEntry};
use std::collections::{BinaryHeap, HashMap};

/// Outcome of an earliest-arrival search.
#[derive(Debug, Clone)]
pub struct EaResult {
    /// Arrival time at the target, `None` if unreachable.
    pub arrival: Option<f64>,
    /// Tentative arrival per vertex, `f64::INFINITY` if never reached.
    pub labels: Vec<f64>,
    /// Arc used to reach each vertex.
    pub parent: Vec<Option<ArcId>>,
    pub settled: usize,
}

impl EaResult {
    pub fn arrival_ms(&self) -> Option<i64> {
        self.arrival.map(super::round_ms)
    }

    /// Arcs of the search-tree path ending at `v`, source first.
    pub fn path_to(&self, net: &RoadNetwork, v: VertexId) -> Option<Vec<ArcId>> {
        if !self.labels[v as usize].is_finite() {
            return None;
        }
        let mut arcs = Vec::new();
        let mut cur = v;
        while let Some(a) = self.parent[cur as usize] {
            arcs.push(a);
            cur = net.tail(a);
        }
        arcs.reverse();
        Some(arcs)
    }
}

/// Earliest arrival at `t` when departing `s` at `tau`.
pub fn td_dijkstra_ea(net: &RoadNetwork, s: VertexId, t: VertexId, tau: f64) -> EaResult {
    td_dijkstra_within(net, s, Some(t), tau, |_| true)
}

/// Time-dependent Dijkstra that never enters vertices rejected by `allowed`.
/// Without a target, the whole reachable region is settled.
pub fn td_dijkstra_within(
    net: &RoadNetwork,
    s: VertexId,
    t: Option<VertexId>,
    tau: f64,
    allowed: impl Fn(VertexId) -> bool,
) -> EaResult {
    let n = net.vertex_count();
    let mut labels = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut settled = 0;
    labels[s as usize] = tau;
    heap.push(MinEntry { key: tau, vertex: s });

    while let Some(MinEntry { key, vertex: u }) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        settled += 1;
        if Some(u) == t {
            break;
        }
        for a in net.out_arcs(u) {
            let v = net.head(a);
            if done[v as usize] || !allowed(v) {
                continue;
            }
            let arr = key + net.ttf(a).eval(key);
            if arr < labels[v as usize] {
                labels[v as usize] = arr;
                parent[v as usize] = Some(a);
                heap.push(MinEntry { key: arr, vertex: v });
            }
        }
    }

    let arrival = t.and_then(|t| done[t as usize].then(|| labels[t as usize]));
    EaResult {
        arrival,
        labels,
        parent,
        settled,
    }
}

/// Exact profiles from `s` to each target; unreachable targets are absent.
///
/// Label-correcting: the queue is keyed on the minimum of each tentative profile
/// and a vertex re-enters whenever its profile improves. Once every target has
/// a label, the search stops as soon as the queue minimum reaches the largest
/// target maximum.
pub fn profile_dijkstra(
    net: &RoadNetwork,
    s: VertexId,
    targets: &[VertexId],
    restriction: Option<&dyn Fn(VertexId) -> bool>,
) -> HashMap<VertexId, Ttf> {
    let n = net.vertex_count();
    let allowed = |v: VertexId| restriction.is_none_or(|r| r(v));
    let mut labels: Vec<Option<Ttf>> = vec![None; n];
    let mut queued = vec![false; n];
    let mut heap = BinaryHeap::new();
    labels[s as usize] = Some(Ttf::zero());
    queued[s as usize] = true;
    heap.push(MinEntry { key: 0.0, vertex: s });

    while let Some(MinEntry { key, vertex: u }) = heap.pop() {
        if !queued[u as usize] {
            continue;
        }
        if !targets.is_empty() {
            let bound = targets
                .iter()
                .map(|&t| labels[t as usize].as_ref().map_or(f64::INFINITY, Ttf::max))
                .fold(f64::NEG_INFINITY, f64::max);
            if key >= bound {
                break;
            }
        }
        queued[u as usize] = false;
        let fu = labels[u as usize].clone().expect("queued vertex has a label");
        for a in net.out_arcs(u) {
            let v = net.head(a);
            if !allowed(v) {
                continue;
            }
            let g = link(&fu, net.ttf(a));
            let improved = match &labels[v as usize] {
                None => Some(g),
                Some(fv) if g.min() >= fv.max() => None,
                Some(fv) => {
                    let m = merge(fv, &g);
                    m.uses_g().then_some(m.function)
                }
            };
            if let Some(f) = improved {
                heap.push(MinEntry { key: f.min(), vertex: v });
                labels[v as usize] = Some(f);
                queued[v as usize] = true;
            }
        }
    }

    let wanted: Vec<VertexId> = if targets.is_empty() {
        (0..n as VertexId).collect()
    } else {
        targets.to_vec()
    };
    wanted
        .into_iter()
        .filter_map(|t| labels[t as usize].clone().map(|f| (t, f)))
        .collect()
}

/// Latest departure from each vertex that still reaches one of the `sources`
/// by its deadline. Runs backwards over incoming arcs in decreasing label order
/// and stops once the extracted label falls below `floor`. Sources keep their
/// deadlines; other vertices are reported only if settled at or above `floor`.
pub fn latest_departure(
    net: &RoadNetwork,
    sources: &[(VertexId, f64)],
    floor: f64,
    restriction: Option<&dyn Fn(VertexId) -> bool>,
) -> HashMap<VertexId, f64> {
    let n = net.vertex_count();
    let allowed = |v: VertexId| restriction.is_none_or(|r| r(v));
    let mut labels = vec![f64::NEG_INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut out = HashMap::new();
    for &(u, d) in sources {
        if d > labels[u as usize] {
            labels[u as usize] = d;
            heap.push(MaxEntry { key: d, vertex: u });
        }
    }
    for &(u, _) in sources {
        out.insert(u, labels[u as usize]);
    }

    while let Some(MaxEntry { key, vertex: v }) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        if key < floor {
            break;
        }
        done[v as usize] = true;
        out.insert(v, key);
        for &a in net.in_arcs(v) {
            let u = net.tail(a);
            if done[u as usize] || !allowed(u) {
                continue;
            }
            let dep = net.ttf(a).latest_departure(key);
            if dep > labels[u as usize] {
                labels[u as usize] = dep;
                heap.push(MaxEntry { key: dep, vertex: u });
            }
        }
    }
    out
}
