use super::*;

/// `link(f, g) = f + g ∘ (id + f)`: travel time of traversing `f` and then `g`.
///
/// The result has at most `|f| + |g|` breakpoints: the departures of `f` plus the
/// backward projections of the departures of `g`. Constant operands take shortcuts
/// that avoid the sweep.
pub fn link(f: &Ttf, g: &Ttf) -> Ttf {
    match (f.is_constant(), g.is_constant()) {
        (true, true) => Ttf::constant(f.points[0].val + g.points[0].val),
        (false, true) => shift_values(f, g.points[0].val),
        (true, false) => shift_departures(g, f.points[0].val),
        (false, false) => link_sweep(f, g),
    }
}

/// `f + c`.
fn shift_values(f: &Ttf, c: f64) -> Ttf {
    let points = f.points.iter().map(|p| Breakpoint::new(p.at, p.val + c)).collect();
    Ttf {
        points,
        min: f.min + c,
        max: f.max + c,
    }
}

/// `c + g(τ + c)`: every breakpoint of `g` moves `c` earlier.
fn shift_departures(g: &Ttf, c: f64) -> Ttf {
    let mut points: Vec<Breakpoint> = g
        .points
        .iter()
        .map(|p| Breakpoint::new(period_offset(p.at - c), p.val + c))
        .collect();
    let split = points.windows(2).position(|w| w[1].at < w[0].at).map(|i| i + 1).unwrap_or(0);
    points.rotate_left(split);
    dedup_wrap(&mut points);
    Ttf::from_points_unchecked(points)
}

/// General link by one coordinated sweep over `f`'s segments and the unrolled
/// breakpoints of `g`. Also correct for constant operands; used directly when
/// fast paths are disabled.
pub(crate) fn link_sweep(f: &Ttf, g: &Ttf) -> Ttf {
    let n = f.len() as isize;
    let m = g.len() as isize;
    let mut out: Vec<Breakpoint> = Vec::with_capacity(f.len() + g.len());

    let first = f.unrolled(0);
    let a0 = first.at + first.val;
    let q = (a0 / PERIOD).floor();
    let r = a0 - q * PERIOD;
    let mut j = q as isize * m + g.points.partition_point(|p| p.at <= r) as isize;

    for i in 0..n {
        let p = f.unrolled(i);
        let p2 = f.unrolled(i + 1);
        let arr1 = p.at + p.val;
        let arr2 = p2.at + p2.val;
        while g.unrolled(j).at <= arr1 {
            j += 1;
        }
        while g.unrolled(j - 1).at > arr1 {
            j -= 1;
        }
        let g_val = interpolate(g.unrolled(j - 1), g.unrolled(j), arr1);
        push_point(&mut out, Breakpoint::new(p.at, p.val + g_val));

        while g.unrolled(j).at < arr2 {
            let y = g.unrolled(j);
            if arr2 > arr1 {
                let tau = p.at + (y.at - arr1) * (p2.at - p.at) / (arr2 - arr1);
                let f_val = interpolate(p, p2, tau);
                push_point(&mut out, Breakpoint::new(tau, f_val + y.val));
            }
            j += 1;
        }
    }

    for p in out.iter_mut() {
        if p.at >= PERIOD {
            p.at -= PERIOD;
        }
    }
    let split = out.windows(2).position(|w| w[1].at < w[0].at).map(|i| i + 1).unwrap_or(0);
    out.rotate_left(split);
    dedup_wrap(&mut out);
    Ttf::from_points_unchecked(out)
}

fn push_point(out: &mut Vec<Breakpoint>, p: Breakpoint) {
    if let Some(last) = out.last() {
        if fuzzy_eq(last.at, p.at) {
            return;
        }
    }
    out.push(p);
}

/// Drop a trailing point that coincides with the first one across the wrap.
pub(crate) fn dedup_wrap(points: &mut Vec<Breakpoint>) {
    while points.len() > 1 && points[points.len() - 1].at + EPSILON >= PERIOD + points[0].at {
        points.pop();
    }
    if let Some(p) = points.first_mut() {
        if p.at < 0.0 {
            p.at = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plf::tests::random_fifo;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_plus_constant() {
        let h = link(&Ttf::constant(100_000.0), &Ttf::constant(200_000.0));
        assert!(h.is_constant());
        assert_eq!(h.eval(0.0), 300_000.0);
    }

    #[test]
    fn zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_fifo(&mut rng, 6);
        assert_eq!(link(&Ttf::zero(), &g), g);
    }

    #[test]
    fn pointwise_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let k1 = rng.gen_range(1..=8);
            let k2 = rng.gen_range(1..=8);
            let f = random_fifo(&mut rng, k1);
            let g = random_fifo(&mut rng, k2);
            let h = link(&f, &g);
            assert!(h.len() <= f.len() + g.len());
            assert!(h.check_fifo());
            for _ in 0..100 {
                let t = rng.gen_range(0.0..PERIOD);
                let expected = f.eval(t) + g.eval(t + f.eval(t));
                assert!((h.eval(t) - expected).abs() <= 1.0, "{} vs {}", h.eval(t), expected);
            }
        }
    }

    #[test]
    fn sweep_agrees_with_fast_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Ttf::constant(12_345.0);
        for _ in 0..50 {
            let f = random_fifo(&mut rng, 7);
            for (a, b) in [(&c, &f), (&f, &c), (&c, &c)] {
                let fast = link(a, b);
                let slow = link_sweep(a, b);
                // the sweep keeps the constant operand's breakpoint at 0
                assert!(slow.len() <= fast.len() + 1);
                assert!(fast.max_abs_diff(&slow) < 1e-6);
            }
        }
    }
}
