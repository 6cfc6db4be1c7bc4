//! Min-heap entries keyed by `f64`, ties broken by vertex id.

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy)]
pub(crate) struct MinEntry {
    pub key: f64,
    pub vertex: u32,
}

impl PartialEq for MinEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MinEntry {}

impl PartialOrd for MinEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinEntry {
    // reversed so that `BinaryHeap` pops the smallest key first
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Max-heap entry for latest-departure searches.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MaxEntry {
    pub key: f64,
    pub vertex: u32,
}

impl PartialEq for MaxEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MaxEntry {}

impl PartialOrd for MaxEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MaxEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then_with(|| other.vertex.cmp(&self.vertex))
    }
}
