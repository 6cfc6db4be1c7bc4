use super::link::dedup_wrap;
use super::*;

/// Which operand a segment of a merged function comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    F,
    G,
}

#[derive(Debug, Clone)]
pub struct MergeResult {
    pub function: Ttf,
    /// Source of the segment starting at each breakpoint of `function`.
    pub sources: Vec<Source>,
}

impl MergeResult {
    pub fn uses_f(&self) -> bool {
        self.sources.contains(&Source::F)
    }

    pub fn uses_g(&self) -> bool {
        self.sources.contains(&Source::G)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// `f(τ) <= g(τ)` everywhere; also reported when both are equal.
    FDominates,
    GDominates,
    Crossing,
}

/// `merge(f, g) = min(f, g)` with per-segment provenance. Exact ties go to `f`.
pub fn merge(f: &Ttf, g: &Ttf) -> MergeResult {
    // union of departures, remembering which function has a kink there
    let mut xs: Vec<f64> = Vec::with_capacity(f.len() + g.len());
    let mut kinks: Vec<(bool, bool)> = Vec::with_capacity(f.len() + g.len());
    {
        let (fp, gp) = (f.points(), g.points());
        let (mut i, mut j) = (0, 0);
        while i < fp.len() || j < gp.len() {
            let take_f = j >= gp.len() || (i < fp.len() && fp[i].at <= gp[j].at);
            let x = if take_f { fp[i].at } else { gp[j].at };
            if take_f {
                i += 1;
            } else {
                j += 1;
            }
            match xs.last() {
                Some(&last) if fuzzy_eq(last, x) => {
                    let k = kinks.last_mut().unwrap();
                    if take_f {
                        k.0 = true;
                    } else {
                        k.1 = true;
                    }
                }
                _ => {
                    xs.push(x);
                    kinks.push((take_f, !take_f));
                }
            }
        }
        if xs.len() > 1 && xs[xs.len() - 1] + EPSILON >= PERIOD + xs[0] {
            let (kf, kg) = kinks.pop().unwrap();
            xs.pop();
            kinks[0].0 |= kf;
            kinks[0].1 |= kg;
        }
    }
    let fv = f.eval_sorted(&xs);
    let gv = g.eval_sorted(&xs);
    let u = xs.len();

    // sub-pieces: (start, value, source, starts at an intersection, union index)
    let mut pieces: Vec<(f64, f64, Source, bool, usize)> = Vec::with_capacity(u + 4);
    for i in 0..u {
        let (x0, x1) = (xs[i], if i + 1 < u { xs[i + 1] } else { xs[0] + PERIOD });
        let k = (i + 1) % u;
        let d0 = fv[i] - gv[i];
        let d1 = fv[k] - gv[k];
        let at_start = |s: Source| (x0, if s == Source::F { fv[i] } else { gv[i] }, s, false, i);
        if d0 <= EPSILON && d1 <= EPSILON {
            pieces.push(at_start(Source::F));
        } else if d0 >= -EPSILON && d1 >= -EPSILON {
            pieces.push(at_start(Source::G));
        } else {
            let t = d0 / (d0 - d1);
            let x = x0 + t * (x1 - x0);
            let val = fv[i] + t * (fv[k] - fv[i]);
            if d0 < 0.0 {
                pieces.push(at_start(Source::F));
                pieces.push((x, val, Source::G, true, i));
            } else {
                pieces.push(at_start(Source::G));
                pieces.push((x, val, Source::F, true, i));
            }
        }
    }

    let mut points = Vec::with_capacity(pieces.len());
    let mut sources = Vec::with_capacity(pieces.len());
    for (idx, &(x, val, src, crossing, ui)) in pieces.iter().enumerate() {
        let prev = pieces[(idx + pieces.len() - 1) % pieces.len()].2;
        let kink = match src {
            Source::F => kinks[ui].0,
            Source::G => kinks[ui].1,
        };
        if crossing || prev != src || kink {
            if let Some(last) = points.last() {
                let last: &Breakpoint = last;
                if fuzzy_eq(last.at, x) {
                    continue;
                }
            }
            points.push(Breakpoint::new(if x >= PERIOD { x - PERIOD } else { x }, val));
            sources.push(src);
        }
    }
    if points.is_empty() {
        let src = pieces[0].2;
        points.push(Breakpoint::new(pieces[0].0, pieces[0].1));
        sources.push(src);
    }
    let split = points.windows(2).position(|w| w[1].at < w[0].at).map(|i| i + 1).unwrap_or(0);
    points.rotate_left(split);
    sources.rotate_left(split);
    dedup_wrap(&mut points);
    sources.truncate(points.len());

    let function = Ttf::from_points_unchecked(points);
    if function.is_constant() {
        sources.truncate(1);
    }
    MergeResult { function, sources }
}

/// Decide domination between `f` and `g` without computing any intersection.
///
/// Every breakpoint of each function is tested against the segment of the other
/// function spanning its departure with an orientation (cross product) test.
pub fn simulated_merge(f: &Ttf, g: &Ttf) -> Dominance {
    if below(f, g) && below_reverse(g, f) {
        Dominance::FDominates
    } else if below(g, f) && below_reverse(f, g) {
        Dominance::GDominates
    } else {
        Dominance::Crossing
    }
}

/// Sidedness of `p` relative to the line through `a` and `b` (with `a.at < b.at`),
/// scaled by the segment width: positive means above.
#[inline]
fn orientation(a: Breakpoint, b: Breakpoint, p: Breakpoint) -> f64 {
    (b.at - a.at) * (p.val - a.val) - (b.val - a.val) * (p.at - a.at)
}

/// All breakpoints of `p` lie on or below the polyline of `q`.
fn below(p: &Ttf, q: &Ttf) -> bool {
    side_check(p, q, |o, w| o <= EPSILON * w)
}

/// All breakpoints of `p` lie on or above the polyline of `q`.
fn below_reverse(p: &Ttf, q: &Ttf) -> bool {
    side_check(p, q, |o, w| o >= -EPSILON * w)
}

fn side_check(p: &Ttf, q: &Ttf, ok: impl Fn(f64, f64) -> bool) -> bool {
    let mut j: isize = 0;
    let n = q.len() as isize;
    for &pt in p.points() {
        while j < n && q.points[j as usize].at <= pt.at {
            j += 1;
        }
        let a = q.unrolled(j - 1);
        let b = q.unrolled(j);
        if !ok(orientation(a, b, pt), b.at - a.at) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plf::tests::random_fifo;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_fifo(&mut rng, 9);
        let r = merge(&f, &f);
        assert!(!r.uses_g());
        assert_eq!(r.function, f);
        assert_eq!(simulated_merge(&f, &f), Dominance::FDominates);
    }

    #[test]
    fn constant_domination() {
        let r = merge(&Ttf::constant(10_000.0), &Ttf::constant(20_000.0));
        assert_eq!(r.function, Ttf::constant(10_000.0));
        assert_eq!(r.sources, vec![Source::F]);
        let r = merge(&Ttf::constant(20_000.0), &Ttf::constant(10_000.0));
        assert_eq!(r.sources, vec![Source::G]);
    }

    #[test]
    fn crossing_two_segment_functions() {
        let f = Ttf::from_ms(&[(0, 10_000), (43_200_000, 50_000)]).unwrap();
        let g = Ttf::from_ms(&[(0, 40_000), (43_200_000, 20_000)]).unwrap();
        let r = merge(&f, &g);
        assert!(r.uses_f() && r.uses_g());
        assert_eq!(simulated_merge(&f, &g), Dominance::Crossing);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let t = rng.gen_range(0.0..PERIOD);
            assert!((r.function.eval(t) - f.eval(t).min(g.eval(t))).abs() < 1e-6);
        }
    }

    #[test]
    fn shifted_copy_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = random_fifo(&mut rng, 7);
        let f = Ttf::new(g.points().iter().map(|p| Breakpoint::new(p.at, p.val - 1_000.0)).collect()).unwrap();
        assert_eq!(simulated_merge(&f, &g), Dominance::FDominates);
        assert_eq!(simulated_merge(&g, &f), Dominance::GDominates);
        assert!(!merge(&f, &g).uses_g());
    }

    /// Oracle: compare both functions at every breakpoint of either one; between
    /// those departures both are linear.
    fn pointwise_dominance(f: &Ttf, g: &Ttf) -> Dominance {
        let xs: Vec<f64> = f.points().iter().chain(g.points()).map(|p| p.at).collect();
        let f_le = xs.iter().all(|&x| f.eval(x) <= g.eval(x) + 1e-6);
        let g_le = xs.iter().all(|&x| g.eval(x) <= f.eval(x) + 1e-6);
        if f_le {
            Dominance::FDominates
        } else if g_le {
            Dominance::GDominates
        } else {
            Dominance::Crossing
        }
    }

    #[test]
    fn random_pairs_match_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let k1 = rng.gen_range(1..=10);
            let k2 = rng.gen_range(1..=10);
            let f = random_fifo(&mut rng, k1);
            let mut g = random_fifo(&mut rng, k2);
            if rng.gen_bool(0.3) {
                // shift g far up or down to exercise domination
                let d = if rng.gen_bool(0.5) { 150_000.0 } else { -5_000.0 };
                let pts = g
                    .points()
                    .iter()
                    .map(|p| Breakpoint::new(p.at, (p.val + d).max(1.0)))
                    .collect();
                g = Ttf::new(pts).unwrap_or(g);
            }
            let r = merge(&f, &g);
            assert!(r.function.check_fifo());
            assert!(r.function.len() <= 2 * (f.len() + g.len()));
            for _ in 0..200 {
                let t = rng.gen_range(0.0..PERIOD);
                let v = r.function.eval(t);
                assert!((v - f.eval(t).min(g.eval(t))).abs() < 1e-5);
            }
            let verdict = simulated_merge(&f, &g);
            assert_eq!(verdict, pointwise_dominance(&f, &g));
            assert_eq!(verdict == Dominance::FDominates, !r.uses_g());
        }
    }
}
