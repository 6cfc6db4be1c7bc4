use super::MultiLevelPartition;
use crate::network::{RoadNetwork, VertexId};
use std::cmp::Reverse;
use std::ops::Range;

/// Boundary-first vertex order.
///
/// The boundary level of a vertex is the highest level on which it is a
/// boundary vertex (0 if none). Vertices are sorted by boundary level
/// descending, then by their cells from the top level down, then by old id.
/// Hence the level-ℓ boundary vertices are exactly the prefix `[0, nb_ℓ)`, and
/// for every level, cell and boundary level the matching vertices are one
/// contiguous id range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrdering {
    new_id: Vec<VertexId>,
    old_id: Vec<VertexId>,
    /// `at_least[b]`: number of vertices with boundary level `>= b`, for `b` in `0..=L + 1`.
    at_least: Vec<u32>,
    /// `members[ℓ - 1][cell][b]`: vertices of the cell with boundary level `b`.
    members: Vec<Vec<Vec<Range<u32>>>>,
    /// Per boundary level, the start of each run of one level-1 cell.
    lookup: Vec<Vec<(u32, u32)>>,
    /// `parent[ℓ - 1][cell]`: the enclosing level-(ℓ+1) cell.
    parent: Vec<Vec<u32>>,
}

impl VertexOrdering {
    pub fn level_count(&self) -> usize {
        self.at_least.len() - 2
    }

    pub fn vertex_count(&self) -> usize {
        self.new_id.len()
    }

    /// `new_id()[old] = new`.
    pub fn new_id(&self) -> &[VertexId] {
        &self.new_id
    }

    /// `old_id()[new] = old`.
    pub fn old_id(&self) -> &[VertexId] {
        &self.old_id
    }

    /// Ids of the boundary vertices of `level`.
    pub fn boundary_range(&self, level: usize) -> Range<u32> {
        0..self.at_least[level]
    }

    pub fn is_boundary(&self, level: usize, v: VertexId) -> bool {
        v < self.at_least[level]
    }

    pub fn boundary_level(&self, v: VertexId) -> usize {
        (1..=self.level_count()).rev().find(|&l| v < self.at_least[l]).unwrap_or(0)
    }

    pub fn cell_count(&self, level: usize) -> usize {
        self.members[level - 1].len()
    }

    /// Cell of `v` on `level`, found from the id ranges.
    pub fn cell(&self, level: usize, v: VertexId) -> u32 {
        let runs = &self.lookup[self.boundary_level(v)];
        let i = runs.partition_point(|&(start, _)| start <= v) - 1;
        let mut c = runs[i].1;
        for l in 1..level {
            c = self.parent[l - 1][c as usize];
        }
        c
    }

    /// Enclosing cell on `level + 1` of a level-`level` cell.
    pub fn parent_cell(&self, level: usize, cell: u32) -> u32 {
        self.parent[level - 1][cell as usize]
    }

    /// Id range of the vertices of `cell` on `level` whose boundary level is `b`.
    pub fn member_range(&self, level: usize, cell: u32, b: usize) -> Range<u32> {
        self.members[level - 1][cell as usize][b].clone()
    }

    /// Vertices of a cell with boundary level at least `min_b`, ascending.
    pub fn cell_vertices(&self, level: usize, cell: u32, min_b: usize) -> impl Iterator<Item = VertexId> + '_ {
        let ranges = &self.members[level - 1][cell as usize];
        (min_b..ranges.len()).rev().flat_map(move |b| ranges[b].clone())
    }

    /// Vertices of a level-1 cell that are not boundary vertices of any level.
    pub fn interior_range(&self, cell: u32) -> Range<u32> {
        self.member_range(1, cell, 0)
    }

    /// Explicit cell assignment in new ids.
    pub fn partition(&self) -> MultiLevelPartition {
        let cells = (1..=self.level_count())
            .map(|l| (0..self.vertex_count() as VertexId).map(|v| self.cell(l, v)).collect())
            .collect();
        MultiLevelPartition::from_cells(cells).expect("ordering derives from a valid partition")
    }
}

/// Boundary vertices per level and per cell, in new ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySet {
    levels: Vec<Vec<VertexId>>,
    cells: Vec<Vec<Vec<VertexId>>>,
}

impl BoundarySet {
    pub fn level(&self, level: usize) -> &[VertexId] {
        &self.levels[level - 1]
    }

    /// Boundary vertices of one cell, ascending.
    pub fn cell(&self, level: usize, cell: u32) -> &[VertexId] {
        &self.cells[level - 1][cell as usize]
    }

    pub fn contains(&self, level: usize, v: VertexId) -> bool {
        (v as usize) < self.levels[level - 1].len()
    }
}

/// Relabel `net` into boundary-first order and index cells by id ranges.
pub fn reorder_and_index(net: &RoadNetwork, p: &MultiLevelPartition) -> (RoadNetwork, VertexOrdering, BoundarySet) {
    let n = net.vertex_count();
    let levels = p.level_count();

    let mut blevel = vec![0usize; n];
    for (t, h, _) in net.arcs() {
        if let Some(l) = (1..=levels).rev().find(|&l| p.cell(l, t) != p.cell(l, h)) {
            blevel[t as usize] = blevel[t as usize].max(l);
            blevel[h as usize] = blevel[h as usize].max(l);
        }
    }

    let mut old_id: Vec<VertexId> = (0..n as VertexId).collect();
    old_id.sort_by_cached_key(|&v| {
        let cells: Vec<u32> = (1..=levels).rev().map(|l| p.cell(l, v)).collect();
        (Reverse(blevel[v as usize]), cells, v)
    });
    let mut new_id = vec![0; n];
    for (new, &old) in old_id.iter().enumerate() {
        new_id[old as usize] = new as VertexId;
    }

    let mut at_least = vec![0u32; levels + 2];
    for &b in &blevel {
        for slot in &mut at_least[..=b] {
            *slot += 1;
        }
    }

    let mut members: Vec<Vec<Vec<Range<u32>>>> = (1..=levels).map(|l| vec![vec![0..0; levels + 1]; p.cell_count(l)]).collect();
    let mut lookup = vec![Vec::new(); levels + 1];
    for (new, &old) in old_id.iter().enumerate() {
        let b = blevel[old as usize];
        let v = new as u32;
        for l in 1..=levels {
            let r = &mut members[l - 1][p.cell(l, old) as usize][b];
            if r.start == r.end {
                *r = v..v + 1;
            } else {
                debug_assert_eq!(r.end, v, "cell range not contiguous");
                r.end = v + 1;
            }
        }
        let c1 = p.cell(1, old);
        if lookup[b].last().is_none_or(|&(_, c)| c != c1) {
            lookup[b].push((v, c1));
        }
    }

    let mut parent: Vec<Vec<u32>> = (1..levels).map(|l| vec![0; p.cell_count(l)]).collect();
    for v in 0..n as VertexId {
        for l in 1..levels {
            parent[l - 1][p.cell(l, v) as usize] = p.cell(l + 1, v);
        }
    }

    let ordering = VertexOrdering {
        new_id,
        old_id,
        at_least,
        members,
        lookup,
        parent,
    };
    let boundary = BoundarySet {
        levels: (1..=levels).map(|l| ordering.boundary_range(l).collect()).collect(),
        cells: (1..=levels)
            .map(|l| {
                (0..p.cell_count(l) as u32)
                    .map(|c| ordering.cell_vertices(l, c, l).collect())
                    .collect()
            })
            .collect(),
    };
    (net.permuted(&ordering.new_id), ordering, boundary)
}
