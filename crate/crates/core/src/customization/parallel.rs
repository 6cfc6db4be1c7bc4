//! Work distribution over boundary vertices and the deterministic merge of the
//! worker buffers.

use super::{CellSearch, CustomizationConfig, LevelGraph, SearchCounters};
use crate::network::VertexId;
use crate::overlay::SlotValue;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Row of a clique matrix computed from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct RowOutput {
    pub source: VertexId,
    pub values: Vec<SlotValue>,
}

/// Merge per-worker buffers, each ascending by source, into one run ordered by
/// source. Equal sources keep their buffer order.
pub fn merge_worker_outputs(buffers: Vec<Vec<RowOutput>>) -> Vec<RowOutput> {
    let mut all: Vec<RowOutput> = buffers.into_iter().flatten().collect();
    // stable merge sort; linear on few presorted runs
    all.sort_by_key(|r| r.source);
    all
}

/// Profile searches for `sources` on `graph`. Workers claim sources one at a
/// time from a shared cursor; results do not depend on the worker count.
pub(crate) fn customize_rows(
    graph: &LevelGraph<'_>,
    sources: &[VertexId],
    cfg: &CustomizationConfig,
) -> (Vec<RowOutput>, SearchCounters) {
    let n = graph.net.vertex_count();
    let workers = cfg.workers.clamp(1, sources.len().max(1));
    let cursor = AtomicUsize::new(0);
    let level = graph.level;
    let work = |search: &mut CellSearch| {
        let mut out = Vec::new();
        loop {
            let i = cursor.fetch_add(1, Ordering::Relaxed);
            let Some(&s) = sources.get(i) else { break };
            let targets = &graph.topo.cell(level, graph.topo.cell_of(level, s)).boundary;
            let values = search.run(graph, s, targets, &cfg.accelerations);
            out.push(RowOutput { source: s, values });
        }
        out
    };

    if workers == 1 {
        let mut search = CellSearch::new(n);
        let rows = work(&mut search);
        return (merge_worker_outputs(vec![rows]), search.counters);
    }
    let buffers = Mutex::new(Vec::with_capacity(workers));
    let counters = Mutex::new(SearchCounters::default());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut search = CellSearch::new(n);
                let rows = work(&mut search);
                buffers.lock().unwrap().push(rows);
                *counters.lock().unwrap() += search.counters;
            });
        }
    });
    let buffers = buffers.into_inner().unwrap();
    (merge_worker_outputs(buffers), counters.into_inner().unwrap())
}
