use super::*;
use crate::network::{generate_synthetic, td_dijkstra_ea, SyntheticParams};
use crate::partition::build_partition;
use crate::plf::Breakpoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64) -> (RoadNetwork, Engine) {
    let net = generate_synthetic(&SyntheticParams::new(20, 16, 0.5, 8, seed));
    let p = build_partition(&net, &[8, 32, 128]).unwrap();
    let mut engine = Engine::new(&net, &p).unwrap();
    engine.customize(&CustomizationConfig::exact(3));
    (net, engine)
}

fn snapshot_bytes(e: &Engine) -> Vec<u8> {
    let mut buf = Vec::new();
    e.write_snapshot(&mut buf).unwrap();
    buf
}

#[test]
fn queries_use_caller_ids() {
    let (net, engine) = setup(1);
    let mut q = engine.querier(QueryConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..300 {
        let (s, t) = (rng.gen_range(0..320), rng.gen_range(0..320));
        let tau = rng.gen_range(0.0..86_400_000.0);
        let r = q.run(s, t, tau);
        assert_eq!((r.source, r.target), (s, t));
        assert_eq!(r.arrival_ms(), td_dijkstra_ea(&net, s, t, tau).arrival_ms());
        if let Some(path) = engine.unpack(&r).unwrap() {
            assert_eq!(path.first(), Some(&s));
            assert_eq!(path.last(), Some(&t));
            assert!(path.windows(2).all(|w| net.find_arc(w[0], w[1]).is_some()));
        }
    }
}

#[test]
fn original_views_round_trip() {
    let (net, engine) = setup(3);
    assert_eq!(engine.original_network(), net);
    let p = build_partition(&net, &[8, 32, 128]).unwrap();
    assert_eq!(engine.partition(), p);
}

#[test]
fn snapshot_round_trip() {
    let (_, engine) = setup(4);
    let bytes = snapshot_bytes(&engine);
    let loaded = Engine::read_snapshot(&bytes[..]).unwrap();
    assert_eq!(loaded.pool(), engine.pool());
    assert_eq!(loaded.network(), engine.network());
    assert_eq!(loaded.config().epsilon, engine.config().epsilon);
    assert!(loaded.is_customized());
    assert_eq!(snapshot_bytes(&loaded), bytes);
}

#[test]
fn uncustomized_snapshot_round_trip() {
    let net = generate_synthetic(&SyntheticParams::new(6, 6, 0.5, 4, 1));
    let engine = Engine::new(&net, &build_partition(&net, &[4, 16]).unwrap()).unwrap();
    let loaded = Engine::read_snapshot(&snapshot_bytes(&engine)[..]).unwrap();
    assert!(!loaded.is_customized());
    assert_eq!(loaded, engine);
}

#[test]
fn damaged_snapshots_are_rejected() {
    let (_, engine) = setup(5);
    let bytes = snapshot_bytes(&engine);
    for cut in [0, 4, 20, bytes.len() / 2, bytes.len() - 1] {
        assert!(
            matches!(Engine::read_snapshot(&bytes[..cut]), Err(Error::Snapshot(_))),
            "cut {cut}"
        );
    }
    let mut wrong = bytes.clone();
    wrong[0] = b'X';
    assert!(matches!(Engine::read_snapshot(&wrong[..]), Err(Error::Snapshot(_))));
    let mut longer = bytes;
    longer.push(0);
    assert!(matches!(Engine::read_snapshot(&longer[..]), Err(Error::Snapshot(_))));
}

#[test]
fn worker_count_does_not_change_snapshot() {
    let (_, mut engine) = setup(6);
    let mut cfg = CustomizationConfig::with_epsilon(3, 0.01);
    engine.customize(&cfg);
    let one = snapshot_bytes(&engine);
    cfg.workers = 4;
    engine.customize(&cfg);
    assert_eq!(snapshot_bytes(&engine), one);
}

#[test]
fn updates_use_caller_ids() {
    let (net, mut engine) = setup(7);
    let a = (0..net.arc_count() as u32).find(|&a| net.ttf(a).is_constant()).unwrap();
    let (t, h) = (net.tail(a), net.head(a));
    let slow = net.ttf(a).min() * 3.0;
    let h8 = 8.0 * 3_600_000.0;
    let u = PartialUpdate::new(t, h, h8, h8 + 7_200_000.0, vec![Breakpoint::new(h8 + 3_600_000.0, slow)]);
    let changes = engine.apply_updates(&UpdateBatch::new(vec![u.clone()], 0.0)).unwrap();
    assert_eq!(changes.arcs.len(), 1);
    let updated = engine.original_network();
    let a2 = updated.find_arc(t, h).unwrap();
    assert_eq!(updated.ttf(a2).eval(h8 + 3_600_000.0), slow);

    let mut q = engine.querier(QueryConfig::default());
    let r = q.run(t, h, h8 + 3_600_000.0);
    assert_eq!(r.arrival_ms(), td_dijkstra_ea(&updated, t, h, h8 + 3_600_000.0).arrival_ms());

    let missing = PartialUpdate::new(t, t, h8, h8 + 1.0, vec![]);
    assert!(matches!(
        engine.apply_updates(&UpdateBatch::new(vec![missing], 0.0)),
        Err(Error::NoSuchArc { tail, head }) if tail == t && head == t
    ));
}
