//! Nested multi-level partitions, boundary vertices and the boundary-first
//! vertex order.
//!
//! Levels are numbered from 1 (finest) to `L` (coarsest).

mod io;
mod order;

pub use io::{load_partition, parse_partition, save_partition, write_partition};
pub use order::{reorder_and_index, BoundarySet, VertexOrdering};

use crate::error::{Error, Result};
use crate::network::{RoadNetwork, VertexId};
use std::collections::VecDeque;

/// Default maximum cell sizes, finest first.
pub const DEFAULT_LEVEL_SIZES: [usize; 3] = [1 << 4, 1 << 8, 1 << 12];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLevelPartition {
    /// `cells[ℓ - 1][v]` is the level-ℓ cell of `v`.
    cells: Vec<Vec<u32>>,
    cell_counts: Vec<usize>,
    max_sizes: Vec<usize>,
}

impl MultiLevelPartition {
    /// Wrap raw assignments after checking coverage, density and nesting.
    pub fn from_cells(cells: Vec<Vec<u32>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::MalformedPartition("no levels".into()));
        }
        let n = cells[0].len();
        let mut cell_counts = Vec::with_capacity(cells.len());
        let mut max_sizes = Vec::with_capacity(cells.len());
        for (l, level) in cells.iter().enumerate() {
            if level.len() != n {
                return Err(Error::MalformedPartition(format!(
                    "level {} covers {} of {n} vertices",
                    l + 1,
                    level.len()
                )));
            }
            let count = level.iter().max().map_or(0, |&c| c as usize + 1);
            let mut sizes = vec![0usize; count];
            for &c in level {
                sizes[c as usize] += 1;
            }
            if let Some(c) = sizes.iter().position(|&s| s == 0) {
                return Err(Error::MalformedPartition(format!("level {} cell {c} is empty", l + 1)));
            }
            cell_counts.push(count);
            max_sizes.push(sizes.into_iter().max().unwrap_or(0));
        }
        for l in 0..cells.len() - 1 {
            let mut parent = vec![u32::MAX; cell_counts[l]];
            for (v, (&c, &p)) in cells[l].iter().zip(&cells[l + 1]).enumerate() {
                if parent[c as usize] == u32::MAX {
                    parent[c as usize] = p;
                } else if parent[c as usize] != p {
                    return Err(Error::NestingViolation {
                        vertex: v as VertexId,
                        level: l + 1,
                    });
                }
            }
        }
        Ok(MultiLevelPartition {
            cells,
            cell_counts,
            max_sizes,
        })
    }

    pub fn level_count(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.cells[0].len()
    }

    pub fn cell(&self, level: usize, v: VertexId) -> u32 {
        self.cells[level - 1][v as usize]
    }

    pub fn cells(&self, level: usize) -> &[u32] {
        &self.cells[level - 1]
    }

    pub fn cell_count(&self, level: usize) -> usize {
        self.cell_counts[level - 1]
    }

    /// Largest cell actually present on `level`.
    pub fn max_cell_size(&self, level: usize) -> usize {
        self.max_sizes[level - 1]
    }

    /// Same partition over relabelled vertices: `new_id[old] = new`.
    pub fn permuted(&self, new_id: &[VertexId]) -> MultiLevelPartition {
        let cells = self
            .cells
            .iter()
            .map(|level| {
                let mut out = vec![0; level.len()];
                for (old, &c) in level.iter().enumerate() {
                    out[new_id[old] as usize] = c;
                }
                out
            })
            .collect();
        MultiLevelPartition {
            cells,
            cell_counts: self.cell_counts.clone(),
            max_sizes: self.max_sizes.clone(),
        }
    }

    /// Check the partition against a network and configured maxima.
    pub fn validate(&self, n: usize, level_sizes: Option<&[usize]>) -> Result<()> {
        if self.vertex_count() != n {
            return Err(Error::MalformedPartition(format!(
                "partition has {} vertices, network {n}",
                self.vertex_count()
            )));
        }
        if let Some(sizes) = level_sizes {
            if sizes.len() != self.level_count() {
                return Err(Error::InfeasibleLevels(format!(
                    "{} sizes for {} levels",
                    sizes.len(),
                    self.level_count()
                )));
            }
            for (l, (&max, &got)) in sizes.iter().zip(&self.max_sizes).enumerate() {
                if got > max {
                    return Err(Error::MalformedPartition(format!(
                        "level {} has a cell of {got} > {max} vertices",
                        l + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Top-down recursive bisection. Each level-ℓ cell is split independently
/// until every piece fits `level_sizes[ℓ - 1]`. A piece needing `k` cells is cut
/// into parts for `⌊k/2⌋` and `⌈k/2⌉` cells with proportional sizes, so cells
/// end up close to the bound. With coordinates, the cut runs across the wider
/// extent of the piece; otherwise the first part is grown by BFS.
pub fn build_partition(net: &RoadNetwork, level_sizes: &[usize]) -> Result<MultiLevelPartition> {
    if level_sizes.is_empty() {
        return Err(Error::InfeasibleLevels("no levels given".into()));
    }
    if let Some(&s) = level_sizes.iter().find(|&&s| s < 1) {
        return Err(Error::InfeasibleLevels(format!("cell size {s} < 1")));
    }
    if level_sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InfeasibleLevels("sizes must be strictly increasing".into()));
    }
    let n = net.vertex_count();
    let levels = level_sizes.len();
    let mut cells = vec![vec![0u32; n]; levels];
    let mut pieces: Vec<Vec<VertexId>> = vec![(0..n as VertexId).collect()];
    let adj = undirected_adjacency(net);

    for l in (0..levels).rev() {
        let mut next = Vec::new();
        for piece in pieces {
            split_recursive(net, &adj, piece, level_sizes[l], &mut next);
        }
        for (c, piece) in next.iter().enumerate() {
            for &v in piece {
                cells[l][v as usize] = c as u32;
            }
        }
        pieces = next;
    }
    MultiLevelPartition::from_cells(cells)
}

fn undirected_adjacency(net: &RoadNetwork) -> Vec<Vec<VertexId>> {
    let mut adj = vec![Vec::new(); net.vertex_count()];
    for (t, h, _) in net.arcs() {
        adj[t as usize].push(h);
        adj[h as usize].push(t);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

fn split_recursive(net: &RoadNetwork, adj: &[Vec<VertexId>], piece: Vec<VertexId>, max: usize, out: &mut Vec<Vec<VertexId>>) {
    if piece.len() <= max {
        if !piece.is_empty() {
            out.push(piece);
        }
        return;
    }
    let k = piece.len().div_ceil(max);
    let first = piece.len() * (k / 2) / k;
    let (a, b) = match net.coords() {
        Some(c) => coordinate_split(c, piece, first),
        None => bfs_split(adj, piece, first),
    };
    split_recursive(net, adj, a, max, out);
    split_recursive(net, adj, b, max, out);
}

fn coordinate_split(coords: &[(i32, i32)], mut piece: Vec<VertexId>, first: usize) -> (Vec<VertexId>, Vec<VertexId>) {
    let spread = |get: fn((i32, i32)) -> i32| {
        let vals = piece.iter().map(|&v| get(coords[v as usize]));
        vals.clone().max().unwrap() as i64 - vals.min().unwrap() as i64
    };
    let by_lat = spread(|c| c.0) >= spread(|c| c.1);
    piece.sort_unstable_by_key(|&v| {
        let (lat, lon) = coords[v as usize];
        if by_lat {
            (lat, lon, v)
        } else {
            (lon, lat, v)
        }
    });
    let second = piece.split_off(first);
    (piece, second)
}

/// First `half` vertices in BFS order from the lowest id; disconnected
/// leftovers are taken by id once the BFS runs dry.
fn bfs_split(adj: &[Vec<VertexId>], mut piece: Vec<VertexId>, half: usize) -> (Vec<VertexId>, Vec<VertexId>) {
    piece.sort_unstable();
    let inside = |v: &VertexId| piece.binary_search(v).is_ok();
    let mut taken = std::collections::HashSet::with_capacity(half);
    let mut first = Vec::with_capacity(half);
    let mut queue = VecDeque::new();
    let mut next_seed = 0;
    while first.len() < half {
        let v = match queue.pop_front() {
            Some(v) => v,
            None => {
                while taken.contains(&piece[next_seed]) {
                    next_seed += 1;
                }
                let s = piece[next_seed];
                taken.insert(s);
                s
            }
        };
        first.push(v);
        for &w in &adj[v as usize] {
            if inside(&w) && taken.insert(w) {
                queue.push_back(w);
            }
        }
    }
    // vertices queued but not emitted go back to the second half
    for v in queue {
        taken.remove(&v);
    }
    let second = piece.iter().copied().filter(|v| !taken.contains(v)).collect();
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate_synthetic, SyntheticParams};
    use crate::plf::Ttf;

    fn grid(w: usize, h: usize) -> RoadNetwork {
        generate_synthetic(&SyntheticParams::new(w, h, 0.0, 2, 1))
    }

    fn check_nested(p: &MultiLevelPartition, sizes: &[usize]) {
        MultiLevelPartition::from_cells(p.cells.clone()).unwrap();
        p.validate(p.vertex_count(), Some(sizes)).unwrap();
    }

    #[test]
    fn small_network_is_one_top_cell() {
        let net = grid(5, 5);
        let p = build_partition(&net, &[4, 16, 64]).unwrap();
        assert_eq!(p.cell_count(3), 1);
        check_nested(&p, &[4, 16, 64]);
    }

    #[test]
    fn four_by_four_into_quadrants() {
        let net = grid(4, 4);
        let p = build_partition(&net, &[4, 16]).unwrap();
        assert_eq!(p.cell_count(2), 1);
        assert_eq!(p.cell_count(1), 4);
        assert!((0..4).all(|c| p.cells(1).iter().filter(|&&x| x == c).count() == 4));
        check_nested(&p, &[4, 16]);
        // quadrants: each cell spans a 2x2 block
        let c = net.coords().unwrap();
        for cell in 0..4 {
            let members: Vec<_> = (0..16).filter(|&v| p.cell(1, v) == cell).collect();
            let lat: std::collections::BTreeSet<_> = members.iter().map(|&v| c[v as usize].0).collect();
            assert_eq!(lat.len(), 2);
        }
    }

    #[test]
    fn single_level_whole_graph() {
        let net = grid(3, 3);
        let p = build_partition(&net, &[9]).unwrap();
        assert_eq!(p.cell_count(1), 1);
    }

    #[test]
    fn infeasible_sizes_rejected() {
        let net = grid(3, 3);
        assert!(matches!(build_partition(&net, &[0, 4]), Err(Error::InfeasibleLevels(_))));
        assert!(matches!(build_partition(&net, &[8, 4]), Err(Error::InfeasibleLevels(_))));
        assert!(matches!(build_partition(&net, &[]), Err(Error::InfeasibleLevels(_))));
    }

    #[test]
    fn bfs_fallback_respects_sizes() {
        let g = grid(9, 7);
        let arcs = g.arcs().map(|(t, h, f)| (t, h, f.clone())).collect();
        let net = RoadNetwork::from_arcs(63, arcs, None);
        let sizes = [5, 20];
        let p = build_partition(&net, &sizes).unwrap();
        check_nested(&p, &sizes);
        assert_eq!(p, build_partition(&net, &sizes).unwrap());
    }

    #[test]
    fn bfs_handles_disconnected_pieces() {
        let c = Ttf::constant(1.0);
        let net = RoadNetwork::from_arcs(6, vec![(0, 1, c.clone()), (2, 3, c.clone()), (4, 5, c)], None);
        let p = build_partition(&net, &[2, 4]).unwrap();
        check_nested(&p, &[2, 4]);
    }

    #[test]
    fn nesting_violation_detected() {
        let err = MultiLevelPartition::from_cells(vec![vec![0, 0, 1, 1], vec![0, 1, 1, 1]]).unwrap_err();
        assert!(matches!(err, Error::NestingViolation { vertex: 1, level: 1 }));
    }
}
