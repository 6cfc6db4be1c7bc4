//! The complete pipeline behind one handle: preprocessing, customization,
//! queries and live updates, all in the caller's vertex ids.

mod snapshot;

use crate::customization::{customize, CustomizationConfig, CustomizationStats};
use crate::error::{Error, Result};
use crate::live_update::{apply_update_batch, ChangeSet, PartialUpdate, UpdateBatch};
use crate::network::{RoadNetwork, VertexId};
use crate::overlay::{build_topology, FunctionPool, OverlayTopology};
use crate::partition::{reorder_and_index, MultiLevelPartition, VertexOrdering};
use crate::query::{unpack_path, Hop, Query, QueryConfig, QueryGraph, QueryResult};

/// Preprocessed road network with its customized overlay.
///
/// Internally vertices are renumbered boundary-first; every method takes and
/// returns ids of the network passed to [`Engine::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct Engine {
    net: RoadNetwork,
    ord: VertexOrdering,
    topo: OverlayTopology,
    pool: FunctionPool,
    config: CustomizationConfig,
    customized: bool,
}

impl Engine {
    /// Metric-independent preprocessing. The overlay starts uncustomized.
    pub fn new(net: &RoadNetwork, partition: &MultiLevelPartition) -> Result<Engine> {
        partition.validate(net.vertex_count(), None)?;
        let (net, ord, bs) = reorder_and_index(net, partition);
        let topo = build_topology(&net, &ord, &bs);
        let pool = FunctionPool::unset(&topo);
        Ok(Engine {
            config: CustomizationConfig::exact(topo.level_count()),
            net,
            ord,
            topo,
            pool,
            customized: false,
        })
    }

    pub fn level_count(&self) -> usize {
        self.topo.level_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.net.vertex_count()
    }

    /// Network in internal (reordered) ids.
    pub fn network(&self) -> &RoadNetwork {
        &self.net
    }

    pub fn ordering(&self) -> &VertexOrdering {
        &self.ord
    }

    pub fn topology(&self) -> &OverlayTopology {
        &self.topo
    }

    pub fn pool(&self) -> &FunctionPool {
        &self.pool
    }

    /// Configuration of the last customization.
    pub fn config(&self) -> &CustomizationConfig {
        &self.config
    }

    pub fn is_customized(&self) -> bool {
        self.customized
    }

    /// Every level customized without approximation.
    pub fn is_exact(&self) -> bool {
        self.config.epsilon.iter().all(|e| e.is_exact())
    }

    /// The current network (including applied updates) in caller ids.
    pub fn original_network(&self) -> RoadNetwork {
        self.net.permuted(self.ord.old_id())
    }

    pub fn partition(&self) -> MultiLevelPartition {
        self.ord.partition().permuted(self.ord.old_id())
    }

    pub fn to_internal(&self, v: VertexId) -> VertexId {
        self.ord.new_id()[v as usize]
    }

    pub fn to_original(&self, v: VertexId) -> VertexId {
        self.ord.old_id()[v as usize]
    }

    pub fn customize(&mut self, cfg: &CustomizationConfig) -> CustomizationStats {
        let mut pool = FunctionPool::unset(&self.topo);
        let stats = customize(&self.net, &self.topo, &mut pool, cfg);
        self.pool = pool;
        self.config = cfg.clone();
        self.customized = true;
        stats
    }

    pub fn query_graph(&self) -> QueryGraph<'_> {
        QueryGraph {
            net: &self.net,
            ord: &self.ord,
            topo: &self.topo,
            pool: &self.pool,
        }
    }

    /// Reusable query state; panics if the engine is not customized.
    pub fn querier(&self, cfg: QueryConfig) -> EngineQuery<'_> {
        assert!(self.customized, "queries need a customized engine");
        EngineQuery {
            engine: self,
            query: Query::new(self.query_graph(), cfg),
        }
    }

    /// Expand the overlay path of a result returned by [`EngineQuery::run`]
    /// into original vertices. On an exact overlay the arrival along the
    /// expanded path must match the reported one.
    pub fn unpack(&self, res: &QueryResult) -> Result<Option<Vec<VertexId>>> {
        let internal = self.map_result(res, |v| self.to_internal(v));
        let path = unpack_path(self.query_graph(), &internal, self.is_exact())?;
        Ok(path.map(|p| p.vertices.into_iter().map(|v| self.to_original(v)).collect()))
    }

    fn map_result(&self, res: &QueryResult, f: impl Fn(VertexId) -> VertexId) -> QueryResult {
        QueryResult {
            source: f(res.source),
            target: f(res.target),
            path: res
                .path
                .iter()
                .map(|h| Hop {
                    vertex: f(h.vertex),
                    ..*h
                })
                .collect(),
            ..res.clone()
        }
    }

    /// Apply a live-traffic batch. Vertex ids in the returned change set are
    /// caller ids; arc ids refer to [`Engine::network`].
    pub fn apply_updates(&mut self, batch: &UpdateBatch) -> Result<ChangeSet> {
        if !self.customized {
            return Err(Error::InvalidUpdate("engine is not customized".into()));
        }
        let n = self.vertex_count() as VertexId;
        let updates = batch
            .updates
            .iter()
            .map(|u| {
                if u.tail >= n || u.head >= n {
                    return Err(Error::NoSuchArc {
                        tail: u.tail,
                        head: u.head,
                    });
                }
                Ok(PartialUpdate {
                    tail: self.to_internal(u.tail),
                    head: self.to_internal(u.head),
                    ..u.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let internal = UpdateBatch {
            updates,
            ..batch.clone()
        };
        let mut changes =
            apply_update_batch(&internal, &mut self.net, &self.topo, &mut self.pool, &self.config).map_err(|e| match e {
                Error::UpdateRejected { tail, head, source } => Error::UpdateRejected {
                    tail: self.to_original(tail),
                    head: self.to_original(head),
                    source,
                },
                Error::NoSuchArc { tail, head } => Error::NoSuchArc {
                    tail: self.to_original(tail),
                    head: self.to_original(head),
                },
                other => other,
            })?;
        for c in &mut changes.cells {
            for (v, _) in &mut c.vertices {
                *v = self.to_original(*v);
            }
        }
        for s in &mut changes.shortcuts {
            s.from = self.to_original(s.from);
            s.to = self.to_original(s.to);
        }
        Ok(changes)
    }
}

/// Query state bound to an engine.
pub struct EngineQuery<'a> {
    engine: &'a Engine,
    query: Query<'a>,
}

impl<'a> EngineQuery<'a> {
    /// Earliest arrival at `t` departing `s` at `tau` (ms), in caller ids.
    pub fn run(&mut self, s: VertexId, t: VertexId, tau: f64) -> QueryResult {
        let e = self.engine;
        let res = self.query.run(e.to_internal(s), e.to_internal(t), tau);
        e.map_result(&res, |v| e.to_original(v))
    }
}

#[cfg(test)]
mod tests;
