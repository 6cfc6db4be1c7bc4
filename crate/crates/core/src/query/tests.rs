use super::*;
use crate::customization::{customize, CustomizationConfig};
use crate::network::{generate_synthetic, td_dijkstra_ea, SyntheticParams};
use crate::overlay::build_topology;
use crate::partition::{build_partition, reorder_and_index};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Fixture {
    net: RoadNetwork,
    ord: VertexOrdering,
    topo: OverlayTopology,
    pool: FunctionPool,
}

impl Fixture {
    fn new(w: usize, h: usize, sizes: &[usize], cfg: impl Fn(usize) -> CustomizationConfig) -> Self {
        let net = generate_synthetic(&SyntheticParams::new(w, h, 0.5, 8, 7));
        let p = build_partition(&net, sizes).unwrap();
        let (net, ord, bs) = reorder_and_index(&net, &p);
        let topo = build_topology(&net, &ord, &bs);
        let mut pool = FunctionPool::unset(&topo);
        customize(&net, &topo, &mut pool, &cfg(sizes.len()));
        Fixture { net, ord, topo, pool }
    }

    fn graph(&self) -> QueryGraph<'_> {
        QueryGraph {
            net: &self.net,
            ord: &self.ord,
            topo: &self.topo,
            pool: &self.pool,
        }
    }
}

fn random_queries(n: usize, count: usize, seed: u64) -> Vec<(VertexId, VertexId, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.gen_range(0..n as VertexId);
            let t = rng.gen_range(0..n as VertexId);
            (s, t, rng.gen_range(0..86_400_000u64) as f64)
        })
        .collect()
}

fn exact_fixture() -> Fixture {
    Fixture::new(24, 20, &[8, 40, 160], CustomizationConfig::exact)
}

#[test]
fn search_level_matches_partition_scan() {
    let fx = exact_fixture();
    let p = fx.ord.partition();
    let g = fx.graph();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let levels = p.level_count();
    let (mut a, mut b, mut c) = (vec![0; levels], vec![0; levels], vec![0; levels]);
    for _ in 0..2000 {
        let [s, t, v] = [(); 3].map(|_| rng.gen_range(0..fx.net.vertex_count() as VertexId));
        g.cells_of(s, &mut a);
        g.cells_of(t, &mut b);
        g.cells_of(v, &mut c);
        let oracle = (1..=levels)
            .rev()
            .find(|&l| p.cell(l, v) != p.cell(l, s))
            .unwrap_or(0)
            .min((1..=levels).rev().find(|&l| p.cell(l, v) != p.cell(l, t)).unwrap_or(0));
        assert_eq!(search_level(&p, s, t, v), oracle);
        assert_eq!(uncommon_level(&a, &c).min(uncommon_level(&c, &b)), oracle);
        assert_eq!(search_level(&p, s, t, s), 0);
    }
}

#[test]
fn exact_queries_match_td_dijkstra() {
    let fx = exact_fixture();
    let mut q = Query::new(fx.graph(), QueryConfig::default());
    for (s, t, tau) in random_queries(fx.net.vertex_count(), 1000, 2) {
        let r = q.run(s, t, tau);
        let o = td_dijkstra_ea(&fx.net, s, t, tau);
        assert_eq!(r.arrival_ms(), o.arrival_ms(), "{s} -> {t} at {tau}");
    }
}

#[test]
fn source_equals_target() {
    let fx = exact_fixture();
    let mut q = Query::new(fx.graph(), QueryConfig::default());
    let r = q.run(5, 5, 1234.0);
    assert_eq!(r.arrival, Some(1234.0));
    assert_eq!(r.travel_ms(), Some(0));
    assert_eq!(r.path.len(), 1);
}

#[test]
fn pruning_and_flags_never_change_exact_arrivals() {
    let fx = exact_fixture();
    let queries = random_queries(fx.net.vertex_count(), 300, 3);
    let mut plain = Query::new(fx.graph(), QueryConfig::PLAIN);
    let reference: Vec<_> = queries.iter().map(|&(s, t, tau)| plain.run(s, t, tau)).collect();
    for k in 0..=3 {
        for bound_pruning in [false, true] {
            let cfg = QueryConfig {
                clique_flag_top_k: k,
                bound_pruning,
            };
            let mut q = Query::new(fx.graph(), cfg);
            for (&(s, t, tau), r) in queries.iter().zip(&reference) {
                assert_eq!(q.run(s, t, tau).arrival_ms(), r.arrival_ms(), "{cfg:?}");
            }
        }
    }
}

#[test]
fn pruning_saves_evaluations() {
    let fx = exact_fixture();
    let queries = random_queries(fx.net.vertex_count(), 100, 4);
    let total = |cfg| {
        let mut q = Query::new(fx.graph(), cfg);
        queries
            .iter()
            .map(|&(s, t, tau)| q.run(s, t, tau).evaluated_breakpoints)
            .sum::<u64>()
    };
    assert!(total(QueryConfig::default()) < total(QueryConfig::PLAIN));
}

#[test]
fn repeated_queries_are_identical_and_labels_reset() {
    let fx = exact_fixture();
    let mut q = Query::new(fx.graph(), QueryConfig::default());
    for (s, t, tau) in random_queries(fx.net.vertex_count(), 50, 5) {
        let a = q.run(s, t, tau);
        assert!(q.labels().is_clean());
        assert_eq!(q.run(s, t, tau), a);
    }
}

#[test]
fn label_block_covers_largest_cell() {
    let fx = exact_fixture();
    let labels = QueryLabels::new(&fx.ord, &fx.topo);
    let largest = (0..fx.ord.cell_count(1) as u32)
        .map(|c| fx.ord.interior_range(c).len())
        .max()
        .unwrap();
    assert_eq!(labels.capacity(), fx.topo.boundary_count(1) + 2 * largest);
    assert!(labels.capacity() < fx.net.vertex_count());
}

#[test]
fn exact_unpacking_reproduces_arrival() {
    let fx = exact_fixture();
    let mut q = Query::new(fx.graph(), QueryConfig::default());
    for (s, t, tau) in random_queries(fx.net.vertex_count(), 300, 6) {
        let r = q.run(s, t, tau);
        let Some(path) = unpack_path(fx.graph(), &r, true).unwrap() else {
            assert!(r.arrival.is_none());
            continue;
        };
        assert_eq!(path.vertices.first(), Some(&s));
        assert_eq!(path.vertices.last(), Some(&t));
        for (w, &a) in path.vertices.windows(2).zip(&path.arcs) {
            assert_eq!((fx.net.tail(a), fx.net.head(a)), (w[0], w[1]));
        }
    }
}

#[test]
fn path_inside_one_cell_has_only_original_hops() {
    let fx = exact_fixture();
    let mut q = Query::new(fx.graph(), QueryConfig::default());
    let cell = fx.ord.interior_range(0);
    let (s, t) = (cell.start, cell.end - 1);
    let r = q.run(s, t, 0.0);
    if r.arrival.is_some() {
        let unpacked = unpack_path(fx.graph(), &r, true).unwrap().unwrap();
        if r.path.iter().all(|h| h.level == 0) {
            let hops: Vec<_> = r.path.iter().map(|h| h.vertex).collect();
            assert_eq!(unpacked.vertices, hops);
        }
    }
}

#[test]
fn approximate_queries_stay_close_and_paths_are_feasible() {
    let fx = Fixture::new(24, 20, &[8, 40, 160], |l| CustomizationConfig::with_epsilon(l, 0.01));
    let mut q = Query::new(fx.graph(), QueryConfig::default());
    let mut worst: f64 = 0.0;
    for (s, t, tau) in random_queries(fx.net.vertex_count(), 500, 7) {
        let r = q.run(s, t, tau);
        let o = td_dijkstra_ea(&fx.net, s, t, tau);
        let (Some(a), Some(b)) = (r.arrival, o.arrival) else {
            assert_eq!(r.arrival.is_some(), o.arrival.is_some());
            continue;
        };
        if b > tau {
            worst = worst.max(((a - tau) - (b - tau)).abs() / (b - tau));
        }
        let path = unpack_path(fx.graph(), &r, false).unwrap().unwrap();
        // a real path can never beat the optimum
        assert!(path.arrival >= b - 1e-6);
    }
    assert!(worst <= 0.05, "{worst}");
}

#[test]
fn overlay_search_scans_fewer_vertices() {
    let fx = Fixture::new(40, 40, &[16, 128, 512], CustomizationConfig::exact);
    let mut q = Query::new(fx.graph(), QueryConfig::default());
    let mut ratios = Vec::new();
    for (s, t, tau) in random_queries(fx.net.vertex_count(), 100, 8) {
        let r = q.run(s, t, tau);
        let o = td_dijkstra_ea(&fx.net, s, t, tau);
        if o.settled > 200 {
            ratios.push(r.scanned_vertices as f64 / o.settled as f64);
        }
    }
    ratios.sort_by(f64::total_cmp);
    assert!(ratios[ratios.len() / 2] < 1.0, "{ratios:?}");
}
