use crate::network::VertexId;
use crate::overlay::OverlayTopology;
use crate::partition::VertexOrdering;
use std::ops::Range;

pub(crate) const NO_PARENT: u32 = u32::MAX;

/// Query labels with remapped interior vertices.
///
/// Boundary vertices (ids below the level-1 boundary count) own a label each.
/// Interior vertices are only ever reached inside the level-1 cells of source
/// and target, so those two cells share a block of `2 × max interior size`
/// labels. After a query, labels are reset cell by cell through id ranges.
#[derive(Debug, Clone)]
pub struct QueryLabels {
    nb1: u32,
    block: u32,
    pub(crate) arrival: Vec<f64>,
    pub(crate) parent: Vec<u32>,
    pub(crate) parent_level: Vec<u8>,
    pub(crate) flag: Vec<bool>,
    pub(crate) done: Vec<bool>,
    active: [Range<u32>; 2],
    touched: Vec<u32>,
    cell_touched: Vec<bool>,
}

impl QueryLabels {
    pub fn new(ord: &VertexOrdering, topo: &OverlayTopology) -> Self {
        let nb1 = if topo.level_count() == 0 {
            0
        } else {
            topo.boundary_count(1) as u32
        };
        let cells = ord.cell_count(1);
        let block = (0..cells as u32)
            .map(|c| ord.interior_range(c).len() as u32)
            .max()
            .unwrap_or(0);
        let size = (nb1 + 2 * block) as usize;
        QueryLabels {
            nb1,
            block,
            arrival: vec![f64::INFINITY; size],
            parent: vec![NO_PARENT; size],
            parent_level: vec![0; size],
            flag: vec![false; size],
            done: vec![false; size],
            active: [0..0, 0..0],
            touched: Vec::new(),
            cell_touched: vec![false; cells],
        }
    }

    /// Number of label slots, independent of the vertex count.
    pub fn capacity(&self) -> usize {
        self.arrival.len()
    }

    /// Map the interiors of the source and target cells into the shared block.
    pub(crate) fn activate(&mut self, source_interior: Range<u32>, target_interior: Range<u32>) {
        self.active = [source_interior, target_interior];
    }

    #[inline]
    pub(crate) fn index(&self, v: VertexId) -> usize {
        if v < self.nb1 {
            v as usize
        } else if self.active[0].contains(&v) {
            (self.nb1 + v - self.active[0].start) as usize
        } else {
            debug_assert!(self.active[1].contains(&v), "vertex {v} outside the active cells");
            (self.nb1 + self.block + v - self.active[1].start) as usize
        }
    }

    /// Inverse of [`QueryLabels::index`].
    pub(crate) fn vertex(&self, i: usize) -> VertexId {
        let i = i as u32;
        if i < self.nb1 {
            i
        } else if i < self.nb1 + self.block {
            self.active[0].start + i - self.nb1
        } else {
            self.active[1].start + i - self.nb1 - self.block
        }
    }

    /// Record the level-1 cell of a boundary vertex whose label is written.
    #[inline]
    pub(crate) fn note(&mut self, v: VertexId, topo: &OverlayTopology) {
        if v < self.nb1 {
            let c = topo.cell_of(1, v);
            if !self.cell_touched[c as usize] {
                self.cell_touched[c as usize] = true;
                self.touched.push(c);
            }
        }
    }

    fn clear(&mut self, r: Range<usize>) {
        self.arrival[r.clone()].fill(f64::INFINITY);
        self.parent[r.clone()].fill(NO_PARENT);
        self.parent_level[r.clone()].fill(0);
        self.flag[r.clone()].fill(false);
        self.done[r].fill(false);
    }

    /// Reset the boundary ranges of every touched level-1 cell and both blocks.
    pub(crate) fn reset(&mut self, ord: &VertexOrdering) {
        let levels = ord.level_count();
        for c in std::mem::take(&mut self.touched) {
            self.cell_touched[c as usize] = false;
            for b in 1..=levels {
                let r = ord.member_range(1, c, b);
                self.clear(r.start as usize..r.end as usize);
            }
        }
        let (nb1, block) = (self.nb1 as usize, self.block as usize);
        self.clear(nb1..nb1 + 2 * block);
    }

    /// Every label is unreached; used by tests.
    pub fn is_clean(&self) -> bool {
        self.arrival.iter().all(|a| a.is_infinite()) && !self.done.contains(&true) && !self.flag.contains(&true)
    }
}
