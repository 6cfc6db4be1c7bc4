use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdcrp::customization::CustomizationConfig;
use tdcrp::live_update::{parse_updates, splice, write_updates, PartialUpdate, UpdateBatch};
use tdcrp::network::{generate_synthetic, parse_network, td_dijkstra_ea, write_network, RoadNetwork, SyntheticParams};
use tdcrp::partition::{build_partition, parse_partition, write_partition};
use tdcrp::plf::{approximate, link, merge, ApproxError, Breakpoint, Ttf, PERIOD};
use tdcrp::query::QueryConfig;
use tdcrp::Engine;

const H: f64 = 3_600_000.0;

/// Periodic FIFO functions with 1..=max_len breakpoints on integer ms.
fn fifo(max_len: usize) -> impl Strategy<Value = Ttf> {
    prop::collection::vec((0..PERIOD as u64, 1_000u64..300_000), 1..=max_len).prop_map(|raw| {
        let mut pts: Vec<(u64, u64)> = raw;
        pts.sort_unstable();
        pts.dedup_by_key(|p| p.0);
        for _ in 0..2 {
            for i in 0..pts.len() {
                let j = (i + 1) % pts.len();
                let gap = if j == 0 {
                    pts[0].0 + PERIOD as u64 - pts[i].0
                } else {
                    pts[j].0 - pts[i].0
                };
                if pts[j].1 + gap < pts[i].1 {
                    pts[j].1 = pts[i].1 - gap;
                }
            }
        }
        Ttf::from_ms(&pts).unwrap()
    })
}

fn departure() -> impl Strategy<Value = f64> {
    (0..PERIOD as u64).prop_map(|t| t as f64)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn evaluation_is_periodic(f in fifo(20), t in departure()) {
        prop_assert!(close(f.eval(t), f.eval(t + PERIOD)));
        prop_assert!(f.eval(t) >= f.min() - 1e-9 && f.eval(t) <= f.max() + 1e-9);
    }

    #[test]
    fn link_composes_pointwise(f in fifo(16), g in fifo(16), ts in prop::collection::vec(departure(), 8)) {
        let h = link(&f, &g);
        prop_assert!(h.check_fifo());
        prop_assert!(h.len() <= f.len() + g.len());
        for t in ts {
            let ft = f.eval(t);
            prop_assert!(close(h.eval(t), ft + g.eval(t + ft)), "t {t}");
        }
    }

    #[test]
    fn merge_is_pointwise_minimum(f in fifo(16), g in fifo(16), ts in prop::collection::vec(departure(), 8)) {
        let m = merge(&f, &g);
        prop_assert!(m.function.check_fifo());
        prop_assert_eq!(m.sources.len(), m.function.len());
        let swapped = merge(&g, &f).function;
        for t in ts.into_iter().chain(f.points().iter().chain(g.points()).map(|p| p.at)) {
            let want = f.eval(t).min(g.eval(t));
            prop_assert!(close(m.function.eval(t), want), "t {t}");
            prop_assert!(close(swapped.eval(t), want), "t {t}");
        }
    }

    #[test]
    fn approximation_stays_in_band(f in fifo(40), eps in prop::sample::select(vec![0.0, 0.001, 0.01, 0.05])) {
        let a = approximate(&f, ApproxError::new(eps).unwrap());
        prop_assert!(a.check_fifo());
        prop_assert!(a.len() <= f.len());
        for t in f.points().iter().chain(a.points()).map(|p| p.at) {
            let (x, y) = (f.eval(t), a.eval(t));
            prop_assert!((x - y).abs() <= eps * x + 1e-6, "t {t}: {x} vs {y}");
        }
    }

    #[test]
    fn latest_departure_inverts_arrival(f in fifo(20), t in departure()) {
        let arrival = t + f.eval(t);
        let sigma = f.latest_departure(arrival);
        prop_assert!(sigma >= t - 1e-6);
        prop_assert!(close(sigma + f.eval(sigma), arrival));
    }

    #[test]
    fn splice_keeps_outside_and_takes_inside(
        f in fifo(20),
        start_h in 1u64..18,
        len_h in 1u64..5,
        factor in 1.0f64..3.0,
    ) {
        let (start, end) = ((start_h as f64) * H, ((start_h + len_h) as f64) * H);
        let mid = ((start + end) / 2.0).round();
        let u = PartialUpdate::new(0, 1, start, end, vec![Breakpoint::new(mid, (f.eval(mid) * factor).round())]);
        if let Ok(s) = splice(&f, &u) {
            prop_assert!(s.check_fifo());
            prop_assert!(close(s.eval(mid), (f.eval(mid) * factor).round()));
            for t in f.points().iter().map(|p| p.at).filter(|&t| t <= start || t >= end) {
                prop_assert!(close(s.eval(t), f.eval(t)), "t {t}");
            }
        }
    }
}

fn params() -> impl Strategy<Value = SyntheticParams> {
    (2usize..12, 2usize..12, 0.0f64..=1.0, 1usize..10, any::<u64>())
        .prop_map(|(w, h, frac, bps, seed)| SyntheticParams::new(w, h, frac, bps, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn network_text_round_trips(p in params()) {
        let net = generate_synthetic(&p);
        prop_assert_eq!(parse_network(&write_network(&net)).unwrap(), net);
    }

    #[test]
    fn partitions_nest_and_respect_sizes(p in params(), base in 2u32..5) {
        let net = generate_synthetic(&p);
        let sizes = [1usize << base, 1 << (base + 2), 1 << (base + 4)];
        let part = build_partition(&net, &sizes).unwrap();
        prop_assert!(part.validate(net.vertex_count(), Some(&sizes)).is_ok());
        for l in 1..part.level_count() {
            for v in 0..net.vertex_count() as u32 {
                for u in 0..net.vertex_count() as u32 {
                    if part.cell(l, u) == part.cell(l, v) {
                        prop_assert_eq!(part.cell(l + 1, u), part.cell(l + 1, v));
                    }
                }
            }
        }
        prop_assert_eq!(parse_partition(&write_partition(&part)).unwrap(), part);
    }
}

fn random_batch(net: &RoadNetwork, rng: &mut ChaCha8Rng) -> UpdateBatch {
    let mut updates: Vec<PartialUpdate> = Vec::new();
    let k = rng.gen_range(1..=6);
    while updates.len() < k {
        let a = rng.gen_range(0..net.arc_count() as u32);
        let start = (rng.gen_range(2.0..16.0) * H).round();
        let end = start + (rng.gen_range(1.0..4.0) * H).round();
        let at = ((start + end) / 2.0).round();
        let val = (net.ttf(a).eval(at) * rng.gen_range(0.5..3.0)).round().max(1.0);
        let u = PartialUpdate::new(net.tail(a), net.head(a), start, end, vec![Breakpoint::new(at, val)]);
        if splice(net.ttf(a), &u).is_ok() && !updates.iter().any(|v| (v.tail, v.head) == (u.tail, u.head)) {
            updates.push(u);
        }
    }
    UpdateBatch::new(updates, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_queries_match_dijkstra(seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let net = generate_synthetic(&SyntheticParams::new(14, 12, frac, 6, seed));
        let part = build_partition(&net, &[6, 24, 96]).unwrap();
        let mut engine = Engine::new(&net, &part).unwrap();
        engine.customize(&CustomizationConfig::exact(3));
        let mut q = engine.querier(QueryConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let (s, t) = (rng.gen_range(0..168), rng.gen_range(0..168));
            let tau = rng.gen_range(0..PERIOD as u64) as f64;
            prop_assert_eq!(q.run(s, t, tau).arrival_ms(), td_dijkstra_ea(&net, s, t, tau).arrival_ms());
        }
    }

    #[test]
    fn live_updates_equal_full_customization(seed in any::<u64>()) {
        let net = generate_synthetic(&SyntheticParams::new(14, 12, 0.5, 6, seed));
        let part = build_partition(&net, &[6, 24, 96]).unwrap();
        let mut engine = Engine::new(&net, &part).unwrap();
        engine.customize(&CustomizationConfig::exact(3));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..3 {
            let batch = random_batch(&engine.original_network(), &mut rng);
            prop_assert_eq!(parse_updates(&write_updates(&batch)).unwrap(), batch.clone());
            engine.apply_updates(&batch).unwrap();
            let mut fresh = Engine::new(&engine.original_network(), &part).unwrap();
            fresh.customize(&CustomizationConfig::exact(3));
            for level in 1..=3 {
                let (a, b) = (engine.pool().level(level).values(), fresh.pool().level(level).values());
                for (x, y) in a.iter().zip(&b) {
                    match (x, y) {
                        (tdcrp::overlay::SlotValue::Function(f), tdcrp::overlay::SlotValue::Function(g)) => {
                            prop_assert!(f.max_abs_diff(g) < 1e-5)
                        }
                        _ => prop_assert_eq!(x, y),
                    }
                }
            }
        }
    }

    #[test]
    fn snapshots_round_trip(seed in any::<u64>(), eps in prop::sample::select(vec![0.0, 0.01])) {
        let net = generate_synthetic(&SyntheticParams::new(10, 10, 0.5, 5, seed));
        let part = build_partition(&net, &[8, 32]).unwrap();
        let mut engine = Engine::new(&net, &part).unwrap();
        engine.customize(&CustomizationConfig::with_epsilon(2, eps));
        let mut bytes = Vec::new();
        engine.write_snapshot(&mut bytes).unwrap();
        let loaded = Engine::read_snapshot(&bytes[..]).unwrap();
        prop_assert_eq!(loaded.pool(), engine.pool());
        let mut again = Vec::new();
        loaded.write_snapshot(&mut again).unwrap();
        prop_assert_eq!(again, bytes);
    }
}
