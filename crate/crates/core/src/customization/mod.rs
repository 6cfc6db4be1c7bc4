//! Metric customization: fills every shortcut slot level by level with
//! cell-restricted profile searches, then approximates each finished level.

mod parallel;
mod search;

pub use parallel::{merge_worker_outputs, RowOutput};
pub use search::SearchCounters;

pub(crate) use parallel::customize_rows;
pub(crate) use search::{CellSearch, LevelGraph};

use crate::network::RoadNetwork;
use crate::overlay::{FunctionPool, LevelPool, OverlayTopology, Slot, SlotValue};
use crate::plf::{approximate, ApproxError, Ttf};
use std::fmt::Write as _;
use std::time::Instant;

/// Individually switchable search accelerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accelerations {
    /// Skip `u -> v` when `f_u^min + f_uv^min > f_v^max`.
    pub bound_pruning: bool,
    /// Cheap link when either operand is constant.
    pub constant_fast_paths: bool,
    /// Compare bounds after linking before any merge.
    pub post_link_bounds: bool,
    /// Decide domination by orientation tests before a real merge.
    pub simulated_merge: bool,
    /// Never relax the arc back to a vertex's unique parent.
    pub hopping_reduction: bool,
    /// Vertices reached only through clique arcs do not relax clique arcs.
    pub clique_flags: bool,
}

impl Accelerations {
    pub const ALL: Accelerations = Accelerations {
        bound_pruning: true,
        constant_fast_paths: true,
        post_link_bounds: true,
        simulated_merge: true,
        hopping_reduction: true,
        clique_flags: true,
    };

    pub const NONE: Accelerations = Accelerations {
        bound_pruning: false,
        constant_fast_paths: false,
        post_link_bounds: false,
        simulated_merge: false,
        hopping_reduction: false,
        clique_flags: false,
    };

    /// Names and setters, for toggling one at a time.
    pub fn toggles() -> [Toggle; 6] {
        [
            ("bound_pruning", |a| &mut a.bound_pruning),
            ("constant_fast_paths", |a| &mut a.constant_fast_paths),
            ("post_link_bounds", |a| &mut a.post_link_bounds),
            ("simulated_merge", |a| &mut a.simulated_merge),
            ("hopping_reduction", |a| &mut a.hopping_reduction),
            ("clique_flags", |a| &mut a.clique_flags),
        ]
    }
}

impl Default for Accelerations {
    fn default() -> Self {
        Accelerations::ALL
    }
}

/// Name of an acceleration and access to its switch.
pub type Toggle = (&'static str, fn(&mut Accelerations) -> &mut bool);

#[derive(Debug, Clone, PartialEq)]
pub struct CustomizationConfig {
    /// One entry per level, finest first.
    pub epsilon: Vec<ApproxError>,
    pub accelerations: Accelerations,
    pub workers: usize,
}

impl CustomizationConfig {
    pub fn exact(levels: usize) -> Self {
        CustomizationConfig {
            epsilon: vec![ApproxError::EXACT; levels],
            accelerations: Accelerations::ALL,
            workers: 1,
        }
    }

    pub fn with_epsilon(levels: usize, eps: f64) -> Self {
        let e = ApproxError::new(eps).expect("epsilon must be finite and non-negative");
        CustomizationConfig {
            epsilon: vec![e; levels],
            ..Self::exact(levels)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelStats {
    pub level: usize,
    /// Breakpoints over all shortcut functions of the level.
    pub bps: usize,
    /// Share of time-dependent shortcuts among all shortcuts, in percent.
    pub td_clq_arcs_pct: f64,
    /// Average breakpoints per time-dependent shortcut.
    pub td_arc_cplx: f64,
    pub time_s: f64,
}

impl LevelStats {
    /// Recount from the pool contents; `time_s` is left at zero.
    pub fn recount(topo: &OverlayTopology, pool: &LevelPool, level: usize) -> LevelStats {
        let mut bps = 0;
        let mut td = 0usize;
        let mut td_bps = 0usize;
        for s in pool.slots() {
            if let Slot::Function { len, .. } = *s {
                bps += len as usize;
                if len > 1 {
                    td += 1;
                    td_bps += len as usize;
                }
            }
        }
        let shortcuts: usize = topo
            .cells(level)
            .iter()
            .map(|c| c.boundary.len() * c.boundary.len().saturating_sub(1))
            .sum();
        LevelStats {
            level,
            bps,
            td_clq_arcs_pct: if shortcuts == 0 {
                0.0
            } else {
                100.0 * td as f64 / shortcuts as f64
            },
            td_arc_cplx: if td == 0 { 0.0 } else { td_bps as f64 / td as f64 },
            time_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CustomizationStats {
    pub levels: Vec<LevelStats>,
    pub counters: SearchCounters,
}

impl CustomizationStats {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,bps,td_clq_arcs_pct,td_arc_cplx,time_s\n");
        for l in &self.levels {
            let _ = writeln!(
                out,
                "{},{},{:.2},{:.2},{:.3}",
                l.level, l.bps, l.td_clq_arcs_pct, l.td_arc_cplx, l.time_s
            );
        }
        out
    }
}

/// Shortcuts of one level as owned functions by slot, `None` where no arc exists.
pub(crate) fn materialize(pool: &LevelPool) -> Vec<Option<Ttf>> {
    pool.values()
        .into_iter()
        .map(|v| match v {
            SlotValue::Function(f) => Some(f),
            _ => None,
        })
        .collect()
}

/// Replace every non-constant shortcut by its minimum-breakpoint approximation.
pub fn approximate_level(pool: &mut FunctionPool, level: usize, eps: ApproxError) {
    if eps.is_exact() {
        return;
    }
    let values = pool.level(level).values().into_iter().map(|v| match v {
        SlotValue::Function(f) if !f.is_constant() => SlotValue::Function(approximate(&f, eps)),
        other => other,
    });
    let approx = LevelPool::from_values(values);
    pool.set_level(level, approx);
}

/// Customize all levels bottom-up, approximating each level once it is done.
pub fn customize(
    net: &RoadNetwork,
    topo: &OverlayTopology,
    pool: &mut FunctionPool,
    cfg: &CustomizationConfig,
) -> CustomizationStats {
    assert_eq!(cfg.epsilon.len(), topo.level_count(), "one epsilon per level");
    let mut stats = CustomizationStats::default();
    for level in 1..=topo.level_count() {
        let start = Instant::now();
        stats.counters += customize_level(net, topo, pool, level, cfg);
        approximate_level(pool, level, cfg.epsilon[level - 1]);
        debug_assert!(pool.level(level).check_layout());
        let mut ls = LevelStats::recount(topo, pool.level(level), level);
        ls.time_s = start.elapsed().as_secs_f64();
        stats.levels.push(ls);
    }
    stats
}

/// Exact customization of one level over the current content of the level below.
pub fn customize_level(
    net: &RoadNetwork,
    topo: &OverlayTopology,
    pool: &mut FunctionPool,
    level: usize,
    cfg: &CustomizationConfig,
) -> SearchCounters {
    let below = if level > 1 {
        materialize(pool.level(level - 1))
    } else {
        Vec::new()
    };
    let graph = LevelGraph {
        net,
        topo,
        level,
        below: &below,
    };
    let sources: Vec<u32> = (0..topo.boundary_count(level) as u32).collect();
    let (rows, counters) = customize_rows(&graph, &sources, cfg);
    let mut values = LevelPool::unset(topo, level).values();
    for row in rows {
        let (first, _) = topo.row(level, row.source);
        for (j, v) in row.values.into_iter().enumerate() {
            values[first as usize + j] = v;
        }
    }
    pool.set_level(level, LevelPool::from_values(values));
    counters
}
