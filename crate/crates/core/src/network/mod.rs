//! Road network model, `tdgr` file I/O, synthetic instances and the reference
//! search algorithms used as oracles.

mod generate;
mod io;
mod search;

pub use generate::{generate_synthetic, SyntheticParams};
pub use io::{load_network, parse_network, save_network, write_network};
pub use search::{latest_departure, profile_dijkstra, td_dijkstra_ea, td_dijkstra_within, EaResult};

use crate::plf::Ttf;
use std::ops::Range;

pub type VertexId = u32;
pub type ArcId = u32;

/// Directed graph in adjacency-array form with a travel-time function per arc.
///
/// Arcs are sorted by tail, then head. The reverse adjacency lists, for each
/// vertex, the forward ids of its incoming arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    first_out: Vec<u32>,
    tail: Vec<VertexId>,
    head: Vec<VertexId>,
    ttf: Vec<Ttf>,
    first_in: Vec<u32>,
    in_arcs: Vec<ArcId>,
    coords: Option<Vec<(i32, i32)>>,
}

impl RoadNetwork {
    /// Build from an arc list; arcs are stably sorted by `(tail, head)`.
    pub fn from_arcs(n: usize, mut arcs: Vec<(VertexId, VertexId, Ttf)>, coords: Option<Vec<(i32, i32)>>) -> Self {
        arcs.sort_by_key(|&(t, h, _)| (t, h));
        let mut first_out = vec![0u32; n + 1];
        for &(t, _, _) in &arcs {
            first_out[t as usize + 1] += 1;
        }
        for v in 0..n {
            first_out[v + 1] += first_out[v];
        }
        let mut tail = Vec::with_capacity(arcs.len());
        let mut head = Vec::with_capacity(arcs.len());
        let mut ttf = Vec::with_capacity(arcs.len());
        for (t, h, f) in arcs {
            tail.push(t);
            head.push(h);
            ttf.push(f);
        }

        let mut first_in = vec![0u32; n + 1];
        for &h in &head {
            first_in[h as usize + 1] += 1;
        }
        for v in 0..n {
            first_in[v + 1] += first_in[v];
        }
        let mut fill = first_in.clone();
        let mut in_arcs = vec![0; head.len()];
        for (a, &h) in head.iter().enumerate() {
            in_arcs[fill[h as usize] as usize] = a as ArcId;
            fill[h as usize] += 1;
        }

        RoadNetwork {
            first_out,
            tail,
            head,
            ttf,
            first_in,
            in_arcs,
            coords,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.first_out.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.head.len()
    }

    pub fn out_arcs(&self, v: VertexId) -> Range<ArcId> {
        self.first_out[v as usize]..self.first_out[v as usize + 1]
    }

    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.in_arcs[self.first_in[v as usize] as usize..self.first_in[v as usize + 1] as usize]
    }

    pub fn head(&self, a: ArcId) -> VertexId {
        self.head[a as usize]
    }

    pub fn tail(&self, a: ArcId) -> VertexId {
        self.tail[a as usize]
    }

    pub fn ttf(&self, a: ArcId) -> &Ttf {
        &self.ttf[a as usize]
    }

    pub fn set_ttf(&mut self, a: ArcId, f: Ttf) {
        self.ttf[a as usize] = f;
    }

    /// First arc `tail -> head`, if any.
    pub fn find_arc(&self, tail: VertexId, head: VertexId) -> Option<ArcId> {
        self.out_arcs(tail).find(|&a| self.head(a) == head)
    }

    pub fn coords(&self) -> Option<&[(i32, i32)]> {
        self.coords.as_deref()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId, &Ttf)> + '_ {
        (0..self.arc_count()).map(move |a| (self.tail[a], self.head[a], &self.ttf[a]))
    }

    /// Relabel vertices: `new_id[old] = new`.
    pub fn permuted(&self, new_id: &[VertexId]) -> RoadNetwork {
        let n = self.vertex_count();
        let arcs = self
            .arcs()
            .map(|(t, h, f)| (new_id[t as usize], new_id[h as usize], f.clone()))
            .collect();
        let coords = self.coords.as_ref().map(|c| {
            let mut out = vec![(0, 0); n];
            for (old, &xy) in c.iter().enumerate() {
                out[new_id[old] as usize] = xy;
            }
            out
        });
        RoadNetwork::from_arcs(n, arcs, coords)
    }

    /// Total breakpoints and number of time-dependent arcs.
    pub fn breakpoint_stats(&self) -> (usize, usize) {
        let td = self.ttf.iter().filter(|f| !f.is_constant()).count();
        (self.ttf.iter().map(Ttf::len).sum(), td)
    }
}

/// Round a time value to integer milliseconds.
#[inline]
pub fn round_ms(t: f64) -> i64 {
    t.round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> RoadNetwork {
        let c = |x| Ttf::constant(x);
        RoadNetwork::from_arcs(3, vec![(2, 0, c(5.0)), (0, 1, c(1.0)), (0, 2, c(2.0)), (1, 2, c(3.0))], None)
    }

    #[test]
    fn arcs_sorted_and_mirrored() {
        let net = tiny();
        let heads: Vec<_> = net.out_arcs(0).map(|a| net.head(a)).collect();
        assert_eq!(heads, vec![1, 2]);
        let tails: Vec<_> = net.in_arcs(2).iter().map(|&a| net.tail(a)).collect();
        assert_eq!(tails, vec![0, 1]);
        for a in 0..net.arc_count() as ArcId {
            assert!(net.in_arcs(net.head(a)).contains(&a));
        }
    }

    #[test]
    fn permutation_inverse_restores_network() {
        let net = tiny();
        let perm = vec![2, 0, 1];
        let mut inv = vec![0; 3];
        for (old, &new) in perm.iter().enumerate() {
            inv[new as usize] = old as VertexId;
        }
        assert_eq!(net.permuted(&perm).permuted(&inv), net);
    }
}
