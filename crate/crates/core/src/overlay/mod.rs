//! Overlay topology: one clique per cell and level over the cell's boundary
//! vertices, and the function pool holding the shortcut profiles.

mod pool;

pub use pool::{FunctionPool, LevelPool, Shortcut, Slot, SlotValue};

use crate::error::{Error, Result};
use crate::network::{ArcId, RoadNetwork, VertexId};
use crate::partition::{BoundarySet, VertexOrdering};

/// Index of a slot inside the pool of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionRef(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellClique {
    /// Boundary vertices of the cell, ascending.
    pub boundary: Vec<VertexId>,
    /// First slot of the row-major `|B| × |B|` matrix.
    pub offset: u32,
}

impl CellClique {
    pub fn slot(&self, row: usize, col: usize) -> FunctionRef {
        FunctionRef(self.offset + (row * self.boundary.len() + col) as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LevelTopology {
    cells: Vec<CellClique>,
    /// Cell and row of each level boundary vertex `u < nb`.
    cell_of: Vec<u32>,
    row_of: Vec<u32>,
    slot_count: u32,
}

/// Metric-independent overlay structure over a boundary-first ordered network.
///
/// Slots of the same cell are stored row-major, cells in id order, so the
/// outgoing shortcuts of every boundary vertex occupy one contiguous block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlayTopology {
    levels: Vec<LevelTopology>,
    /// Highest level on which each arc crosses cells (0: inside a level-1 cell).
    arc_level: Vec<u8>,
}

pub fn build_topology(net: &RoadNetwork, ord: &VertexOrdering, bs: &BoundarySet) -> OverlayTopology {
    let levels = ord.level_count();
    let arc_level = (0..net.arc_count() as ArcId)
        .map(|a| {
            let (t, h) = (net.tail(a), net.head(a));
            (1..=levels).rev().find(|&l| ord.cell(l, t) != ord.cell(l, h)).unwrap_or(0) as u8
        })
        .collect();

    let levels = (1..=levels)
        .map(|l| {
            let nb = bs.level(l).len();
            let mut cell_of = vec![0; nb];
            let mut row_of = vec![0; nb];
            let mut offset = 0u32;
            let cells = (0..ord.cell_count(l) as u32)
                .map(|c| {
                    let boundary = bs.cell(l, c).to_vec();
                    for (row, &u) in boundary.iter().enumerate() {
                        cell_of[u as usize] = c;
                        row_of[u as usize] = row as u32;
                    }
                    let clique = CellClique { boundary, offset };
                    offset += (clique.boundary.len() * clique.boundary.len()) as u32;
                    clique
                })
                .collect();
            LevelTopology {
                cells,
                cell_of,
                row_of,
                slot_count: offset,
            }
        })
        .collect();
    OverlayTopology { levels, arc_level }
}

impl OverlayTopology {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn cell_count(&self, level: usize) -> usize {
        self.levels[level - 1].cells.len()
    }

    pub fn cell(&self, level: usize, cell: u32) -> &CellClique {
        &self.levels[level - 1].cells[cell as usize]
    }

    pub fn cells(&self, level: usize) -> &[CellClique] {
        &self.levels[level - 1].cells
    }

    /// Number of boundary vertices on `level`; they are `0..boundary_count`.
    pub fn boundary_count(&self, level: usize) -> usize {
        self.levels[level - 1].cell_of.len()
    }

    pub fn is_boundary(&self, level: usize, v: VertexId) -> bool {
        (v as usize) < self.boundary_count(level)
    }

    /// Cell of a level boundary vertex.
    pub fn cell_of(&self, level: usize, u: VertexId) -> u32 {
        self.levels[level - 1].cell_of[u as usize]
    }

    /// Matrix slots including the diagonal.
    pub fn slot_count(&self, level: usize) -> usize {
        self.levels[level - 1].slot_count as usize
    }

    /// Directed shortcuts over all levels, diagonal excluded.
    pub fn shortcut_count(&self) -> usize {
        self.levels
            .iter()
            .flat_map(|l| &l.cells)
            .map(|c| c.boundary.len() * c.boundary.len().saturating_sub(1))
            .sum()
    }

    pub fn arc_level(&self, a: ArcId) -> usize {
        self.arc_level[a as usize] as usize
    }

    /// Out-clique of a level boundary vertex: its slot range and the heads.
    pub fn row(&self, level: usize, u: VertexId) -> (u32, &[VertexId]) {
        let lt = &self.levels[level - 1];
        let clique = &lt.cells[lt.cell_of[u as usize] as usize];
        let row = lt.row_of[u as usize] as usize;
        (clique.offset + (row * clique.boundary.len()) as u32, &clique.boundary)
    }

    /// In-clique of a level boundary vertex: slot of the first entry, the
    /// stride between entries and the tails.
    pub fn column(&self, level: usize, v: VertexId) -> (u32, u32, &[VertexId]) {
        let lt = &self.levels[level - 1];
        let clique = &lt.cells[lt.cell_of[v as usize] as usize];
        let b = clique.boundary.len() as u32;
        (clique.offset + lt.row_of[v as usize], b, &clique.boundary)
    }

    /// Slot of the shortcut `u -> v`, if both are boundary vertices of one cell.
    pub fn slot(&self, level: usize, u: VertexId, v: VertexId) -> Result<FunctionRef> {
        let not_in_cell = || Error::NotInCell { level, from: u, to: v };
        if !self.is_boundary(level, u) || !self.is_boundary(level, v) {
            return Err(not_in_cell());
        }
        let lt = &self.levels[level - 1];
        if lt.cell_of[u as usize] != lt.cell_of[v as usize] {
            return Err(not_in_cell());
        }
        let clique = &lt.cells[lt.cell_of[u as usize] as usize];
        Ok(clique.slot(lt.row_of[u as usize] as usize, lt.row_of[v as usize] as usize))
    }
}
