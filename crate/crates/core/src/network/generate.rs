use super::{RoadNetwork, VertexId};
use crate::plf::{Breakpoint, Ttf, PERIOD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of the synthetic grid generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticParams {
    pub width: usize,
    pub height: usize,
    /// Share of arcs that receive a time-dependent function.
    pub td_fraction: f64,
    pub bps_per_td_arc: usize,
    pub seed: u64,
    /// Range of the free-flow arc cost in ms, sampled log-uniformly.
    pub base_cost_ms: (f64, f64),
    /// Grid spacing in microdegrees.
    pub spacing_udeg: i32,
}

impl SyntheticParams {
    pub fn new(width: usize, height: usize, td_fraction: f64, bps_per_td_arc: usize, seed: u64) -> Self {
        SyntheticParams {
            width,
            height,
            td_fraction,
            bps_per_td_arc,
            seed,
            base_cost_ms: (10_000.0, 120_000.0),
            spacing_udeg: 1_000,
        }
    }
}

const HOUR: f64 = 3_600_000.0;

/// Bidirected `width × height` grid. Vertex `y·width + x` sits at grid position
/// `(x, y)`. Each arc independently becomes time-dependent with probability
/// `td_fraction`; its function samples a daily pattern with a morning and an
/// evening peak at jittered departures.
pub fn generate_synthetic(p: &SyntheticParams) -> RoadNetwork {
    assert!(p.width * p.height >= 2, "grid needs at least two vertices");
    assert!((0.0..=1.0).contains(&p.td_fraction), "td_fraction outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (w, h) = (p.width, p.height);
    let id = |x: usize, y: usize| (y * w + x) as VertexId;

    let mut pairs = Vec::with_capacity(4 * w * h);
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                pairs.push((id(x, y), id(x + 1, y)));
                pairs.push((id(x + 1, y), id(x, y)));
            }
            if y + 1 < h {
                pairs.push((id(x, y), id(x, y + 1)));
                pairs.push((id(x, y + 1), id(x, y)));
            }
        }
    }
    pairs.sort_unstable();

    let (lo, hi) = p.base_cost_ms;
    let arcs = pairs
        .into_iter()
        .map(|(t, hd)| {
            let base = (rng.gen_range(lo.ln()..=hi.ln())).exp().round();
            let td = p.bps_per_td_arc >= 2 && rng.gen_bool(p.td_fraction);
            let f = if td {
                random_profile(&mut rng, base, p.bps_per_td_arc)
            } else {
                Ttf::constant(base)
            };
            (t, hd, f)
        })
        .collect();

    let coords = (0..w * h)
        .map(|v| (((v / w) as i32) * p.spacing_udeg, ((v % w) as i32) * p.spacing_udeg))
        .collect();
    RoadNetwork::from_arcs(w * h, arcs, Some(coords))
}

fn bump(t: f64, center: f64, width: f64) -> f64 {
    // cyclic distance so that peaks near midnight wrap correctly
    let d = (t - center).abs();
    let d = d.min(PERIOD - d);
    (-0.5 * (d / width).powi(2)).exp()
}

fn random_profile(rng: &mut ChaCha8Rng, base: f64, k: usize) -> Ttf {
    let morning = 8.0 * HOUR + rng.gen_range(-0.5..0.5) * HOUR;
    let evening = 17.5 * HOUR + rng.gen_range(-0.5..0.5) * HOUR;
    let (a1, a2) = (rng.gen_range(0.2..1.0), rng.gen_range(0.2..1.0));
    let slot = PERIOD / k as f64;

    let mut deps: Vec<f64> = (0..k)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                (i as f64 * slot + rng.gen_range(-0.4..0.4) * slot).round()
            }
        })
        .collect();
    deps.dedup();
    let mut vals: Vec<f64> = deps
        .iter()
        .map(|&t| (base * (1.0 + a1 * bump(t, morning, 1.5 * HOUR) + a2 * bump(t, evening, 2.0 * HOUR))).round())
        .collect();

    // clamp slopes above -1 (cyclically); values only grow, so this terminates
    loop {
        let mut changed = false;
        for i in 0..deps.len() {
            let j = (i + 1) % deps.len();
            let gap = if j == 0 {
                deps[0] + PERIOD - deps[i]
            } else {
                deps[j] - deps[i]
            };
            let floor = vals[i] - gap + 1.0;
            if vals[j] < floor {
                vals[j] = floor.ceil();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let points = deps.into_iter().zip(vals).map(|(at, val)| Breakpoint::new(at, val)).collect();
    Ttf::new(points).expect("generator produces valid FIFO functions")
}
