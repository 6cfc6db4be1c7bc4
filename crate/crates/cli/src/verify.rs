//! Oracle checks behind `tdcrp verify`.

use crate::run::{customization_config, grid_network, level_sizes, random_queries, relative_error_pct};
use crate::{Common, GridArgs, Outcome};
use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdcrp::live_update::{splice, PartialUpdate, UpdateBatch};
use tdcrp::network::{load_network, td_dijkstra_ea, RoadNetwork};
use tdcrp::overlay::SlotValue;
use tdcrp::partition::{build_partition, load_partition};
use tdcrp::plf::Breakpoint;
use tdcrp::query::{QueryConfig, QuerySpec};
use tdcrp::Engine;

const H: f64 = 3_600_000.0;
/// Largest relative error accepted from an approximated overlay, in percent.
const MAX_APPROX_ERR_PCT: f64 = 5.0;

struct Tally {
    name: &'static str,
    unit: &'static str,
    checked: usize,
    mismatches: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            unit: "queries",
            checked: 0,
            mismatches: 0,
            first: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.mismatches += 1;
            self.first.get_or_insert_with(what);
        }
    }

    fn report(&self) -> bool {
        let status = if self.mismatches == 0 { "ok" } else { "FAIL" };
        println!(
            "{status} {}: {} mismatches / {} {}",
            self.name, self.mismatches, self.checked, self.unit
        );
        if let Some(first) = &self.first {
            println!("   first: {first}");
        }
        self.mismatches == 0
    }
}

pub fn run(c: &Common, grid: &GridArgs, count: usize, update_batches: usize) -> Outcome {
    let net = match &c.network {
        Some(p) => load_network(p).with_context(|| format!("reading {}", p.display()))?,
        None => grid_network(grid, c.seed)?,
    };
    let partition = match &c.partition {
        Some(p) => load_partition(p, &net).with_context(|| format!("reading {}", p.display()))?,
        None => build_partition(&net, &level_sizes(c)?)?,
    };
    let mut engine = Engine::new(&net, &partition)?;
    engine.customize(&customization_config(c, engine.level_count())?);
    let specs = random_queries(net.vertex_count(), count, c.seed);

    let mut tallies = vec![queries(&engine, &net, &specs), unpacking(&engine, &net, &specs)?];
    if engine.is_exact() {
        tallies.push(accelerations_off(&engine, &specs));
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ 0x5eed);
        tallies.extend(updates(&mut engine, &partition, &specs, update_batches, &mut rng)?);
    }
    let failed = tallies.iter().filter(|t| !t.report()).count();
    let m: usize = tallies.iter().map(|t| t.mismatches).sum();
    let n: usize = tallies.iter().filter(|t| t.unit == "queries").map(|t| t.checked).sum();
    println!("{m} mismatches / {n} queries");
    Ok(failed == 0)
}

/// Exact overlays must agree with Dijkstra to the millisecond; approximated
/// ones must stay within the error bound.
fn queries(engine: &Engine, net: &RoadNetwork, specs: &[QuerySpec]) -> Tally {
    let mut tally = Tally::new("earliest arrival vs Dijkstra");
    let mut q = engine.querier(QueryConfig::default());
    for s in specs {
        let r = q.run(s.source, s.target, s.departure_ms as f64);
        let opt = td_dijkstra_ea(net, s.source, s.target, s.departure_ms as f64).arrival_ms();
        let ok = if engine.is_exact() {
            r.arrival_ms() == opt
        } else {
            r.arrival.is_some() == opt.is_some() && relative_error_pct(&r, opt).is_none_or(|e| e <= MAX_APPROX_ERR_PCT)
        };
        tally.check(ok, || {
            format!(
                "{} -> {} at {}: {:?} vs {opt:?}",
                s.source,
                s.target,
                s.departure_ms,
                r.arrival_ms()
            )
        });
    }
    tally
}

/// Clique flags assume shortcuts obey the triangle inequality, which only
/// exact profiles guarantee.
fn accelerations_off(engine: &Engine, specs: &[QuerySpec]) -> Tally {
    let mut tally = Tally::new("query without pruning or flags");
    let mut fast = engine.querier(QueryConfig::default());
    let mut plain = engine.querier(QueryConfig::PLAIN);
    for s in specs {
        let a = fast.run(s.source, s.target, s.departure_ms as f64);
        let b = plain.run(s.source, s.target, s.departure_ms as f64);
        tally.check(a.arrival_ms() == b.arrival_ms(), || {
            format!("{} -> {}: {:?} vs {:?}", s.source, s.target, a.arrival_ms(), b.arrival_ms())
        });
    }
    tally
}

/// Every overlay path expands to a real path that arrives no earlier than
/// the optimum.
fn unpacking(engine: &Engine, net: &RoadNetwork, specs: &[QuerySpec]) -> Result<Tally> {
    let mut tally = Tally::new("path unpacking");
    let mut q = engine.querier(QueryConfig::default());
    for s in specs {
        let tau = s.departure_ms as f64;
        let r = q.run(s.source, s.target, tau);
        let Some(opt) = td_dijkstra_ea(net, s.source, s.target, tau).arrival else {
            continue;
        };
        let path = match engine.unpack(&r) {
            Ok(p) => p,
            Err(e) => {
                tally.check(false, || format!("{} -> {}: {e}", s.source, s.target));
                continue;
            }
        };
        let walked = path.as_deref().and_then(|p| walk(net, p, tau));
        let ok = walked.is_some_and(|a| a >= opt - 1e-3 && (!engine.is_exact() || (a - opt).abs() < 0.5));
        tally.check(ok, || {
            format!("{} -> {}: walked {walked:?}, optimum {opt}", s.source, s.target)
        });
    }
    Ok(tally)
}

/// Arrival along `path` using the fastest parallel arc per hop.
fn walk(net: &RoadNetwork, path: &[u32], tau: f64) -> Option<f64> {
    path.windows(2).try_fold(tau, |t, w| {
        net.out_arcs(w[0])
            .filter(|&a| net.head(a) == w[1])
            .map(|a| t + net.ttf(a).eval(t))
            .min_by(f64::total_cmp)
    })
}

fn random_batch(net: &RoadNetwork, rng: &mut ChaCha8Rng) -> UpdateBatch {
    let k = rng.gen_range(1..=8).min(net.arc_count());
    let mut updates = Vec::new();
    while updates.len() < k {
        let a = rng.gen_range(0..net.arc_count() as u32);
        let start = (rng.gen_range(2.0..16.0) * H).round();
        let end = start + (rng.gen_range(1.0..4.0) * H).round();
        let base = net.ttf(a);
        let at = ((start + end) / 2.0).round();
        let factor = if rng.gen_bool(0.7) {
            rng.gen_range(1.2..3.0)
        } else {
            rng.gen_range(0.5..0.9)
        };
        let u = PartialUpdate::new(
            net.tail(a),
            net.head(a),
            start,
            end,
            vec![Breakpoint::new(at, (base.eval(at) * factor).round().max(1.0))],
        );
        if splice(base, &u).is_ok() && !updates.iter().any(|v: &PartialUpdate| (v.tail, v.head) == (u.tail, u.head)) {
            updates.push(u);
        }
    }
    UpdateBatch::new(updates, 0.0)
}

/// Partial re-customization after each batch must equal customizing the
/// updated network from scratch, slot for slot and query for query.
fn updates(
    engine: &mut Engine,
    partition: &tdcrp::partition::MultiLevelPartition,
    specs: &[QuerySpec],
    batches: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Tally>> {
    let mut slots = Tally::new("live update vs full customization");
    slots.unit = "slots";
    let mut answers = Tally::new("live update vs Dijkstra");
    for _ in 0..batches {
        let batch = random_batch(&engine.original_network(), rng);
        engine.apply_updates(&batch)?;
        let net = engine.original_network();
        let mut fresh = Engine::new(&net, partition)?;
        fresh.customize(engine.config());
        for level in 1..=engine.level_count() {
            let (a, b) = (engine.pool().level(level).values(), fresh.pool().level(level).values());
            for (i, (x, y)) in a.iter().zip(&b).enumerate() {
                let ok = match (x, y) {
                    (SlotValue::Function(f), SlotValue::Function(g)) => f.max_abs_diff(g) < 1e-5,
                    _ => x == y,
                };
                slots.check(ok, || format!("level {level} slot {i}"));
            }
        }
        let mut q = engine.querier(QueryConfig::default());
        for s in specs {
            let r = q.run(s.source, s.target, s.departure_ms as f64);
            let opt = td_dijkstra_ea(&net, s.source, s.target, s.departure_ms as f64).arrival_ms();
            answers.check(r.arrival_ms() == opt, || {
                format!("{} -> {} at {}", s.source, s.target, s.departure_ms)
            });
        }
    }
    Ok(vec![slots, answers])
}
