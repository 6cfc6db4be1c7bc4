//! Periodic piecewise-linear travel-time functions.
//!
//! A [`Ttf`] maps a departure time (milliseconds of the day) to a positive travel
//! time. Breakpoints lie in `[0, PERIOD)` with strictly increasing departures; the
//! segment after the last breakpoint wraps around to the first breakpoint of the
//! next period. A single breakpoint denotes a constant function.
//!
//! Breakpoint coordinates are kept as `f64` milliseconds. Input functions carry
//! integer coordinates, derived ones (link projections, merge intersections)
//! generally do not. Comparisons go through [`EPSILON`].

mod approx;
mod link;
mod merge;

pub use approx::{approximate, ApproxError};
pub use link::link;
pub(crate) use link::link_sweep;
pub use merge::{merge, simulated_merge, Dominance, MergeResult, Source};

use std::fmt;

/// Length of the periodic domain: 24 hours in milliseconds.
pub const PERIOD: f64 = 86_400_000.0;

/// Absolute tolerance (ms) for comparing derived coordinates.
pub const EPSILON: f64 = 1e-6;

#[inline]
pub fn fuzzy_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPSILON
}

#[inline]
pub fn fuzzy_lt(a: f64, b: f64) -> bool {
    a + EPSILON < b
}

/// Reduce a time value into `[0, PERIOD)`.
#[inline]
pub fn period_offset(t: f64) -> f64 {
    let r = t.rem_euclid(PERIOD);
    if r >= PERIOD {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub at: f64,
    pub val: f64,
}

impl Breakpoint {
    pub fn new(at: f64, val: f64) -> Self {
        Breakpoint { at, val }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TtfError {
    #[error("travel-time function has no breakpoints")]
    Empty,
    #[error("departure {0} outside of [0, {PERIOD})")]
    OutOfPeriod(f64),
    #[error("departures not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("travel time {0} is not positive")]
    NonPositive(f64),
    #[error("FIFO property violated on segment starting at departure {0}")]
    Fifo(f64),
}

/// A periodic piecewise-linear travel-time function with cached bounds.
#[derive(Clone, PartialEq)]
pub struct Ttf {
    points: Vec<Breakpoint>,
    min: f64,
    max: f64,
}

impl fmt::Debug for Ttf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ttf")
            .field("min", &self.min)
            .field("max", &self.max)
            .field("points", &self.points.iter().map(|p| (p.at, p.val)).collect::<Vec<_>>())
            .finish()
    }
}

impl Ttf {
    pub fn constant(val: f64) -> Self {
        Ttf {
            points: vec![Breakpoint::new(0.0, val)],
            min: val,
            max: val,
        }
    }

    /// The zero function, identity element of [`link`].
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Validated construction from breakpoints. Travel times must be positive and
    /// the function must be FIFO.
    pub fn new(points: Vec<Breakpoint>) -> Result<Self, TtfError> {
        Self::check_structure(&points)?;
        if let Some(p) = points.iter().find(|p| p.val <= 0.0) {
            return Err(TtfError::NonPositive(p.val));
        }
        let f = Self::from_points_unchecked(points);
        if let Some(at) = f.first_fifo_violation() {
            return Err(TtfError::Fifo(at));
        }
        Ok(f)
    }

    /// Convenience constructor from integer `(departure, travel)` pairs.
    pub fn from_ms(points: &[(u64, u64)]) -> Result<Self, TtfError> {
        Self::new(
            points
                .iter()
                .map(|&(at, val)| Breakpoint::new(at as f64, val as f64))
                .collect(),
        )
    }

    fn check_structure(points: &[Breakpoint]) -> Result<(), TtfError> {
        if points.is_empty() {
            return Err(TtfError::Empty);
        }
        for (i, p) in points.iter().enumerate() {
            if !(0.0..PERIOD).contains(&p.at) {
                return Err(TtfError::OutOfPeriod(p.at));
            }
            if i > 0 && points[i - 1].at >= p.at {
                return Err(TtfError::NotIncreasing(i));
            }
        }
        Ok(())
    }

    /// Build from already sorted points in `[0, PERIOD)`, collapsing to a constant
    /// when all values coincide. Used by the algebra where structure is known.
    pub(crate) fn from_points_unchecked(mut points: Vec<Breakpoint>) -> Self {
        debug_assert!(!points.is_empty());
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for p in &points {
            min = min.min(p.val);
            max = max.max(p.val);
        }
        if points.len() == 1 || max - min <= EPSILON {
            let val = points[0].val;
            points.truncate(1);
            points[0] = Breakpoint::new(0.0, val);
            return Ttf {
                points,
                min: val,
                max: val,
            };
        }
        Ttf { points, min, max }
    }

    pub fn points(&self) -> &[Breakpoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Breakpoint> {
        self.points
    }

    /// Number of breakpoints within one period.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_constant(&self) -> bool {
        self.points.len() == 1
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// Point `i` of the infinite periodic unrolling; index `len()` is the first
    /// breakpoint shifted by one period, `-1` the last one shifted back.
    #[inline]
    pub(crate) fn unrolled(&self, i: isize) -> Breakpoint {
        let n = self.points.len() as isize;
        let q = i.div_euclid(n);
        let p = self.points[i.rem_euclid(n) as usize];
        Breakpoint::new(p.at + q as f64 * PERIOD, p.val)
    }

    /// Travel time when departing at `t` (any real; reduced modulo the period).
    pub fn eval(&self, t: f64) -> f64 {
        let mut probes = 0;
        self.eval_counted(t, &mut probes)
    }

    /// Like [`Ttf::eval`], adding the number of breakpoints inspected to `probes`.
    pub fn eval_counted(&self, t: f64, probes: &mut u64) -> f64 {
        eval_points(&self.points, t, probes)
    }

    pub fn view(&self) -> TtfView<'_> {
        TtfView {
            points: &self.points,
            min: self.min,
            max: self.max,
        }
    }

    /// Evaluate at a sorted sequence of times in `[0, PERIOD)` with a single sweep.
    pub(crate) fn eval_sorted(&self, ts: &[f64]) -> Vec<f64> {
        if self.is_constant() {
            return vec![self.points[0].val; ts.len()];
        }
        let mut out = Vec::with_capacity(ts.len());
        let mut idx: isize = 0;
        let n = self.points.len() as isize;
        for &t in ts {
            while idx < n && self.points[idx as usize].at <= t {
                idx += 1;
            }
            out.push(interpolate(self.unrolled(idx - 1), self.unrolled(idx), t));
        }
        out
    }

    /// `true` iff departing later never arrives earlier, including across the
    /// wraparound segment.
    pub fn check_fifo(&self) -> bool {
        self.first_fifo_violation().is_none()
    }

    fn first_fifo_violation(&self) -> Option<f64> {
        let n = self.points.len() as isize;
        if n == 1 {
            return None;
        }
        (0..n).find_map(|i| {
            let a = self.unrolled(i);
            let b = self.unrolled(i + 1);
            if b.at + b.val < a.at + a.val - EPSILON {
                Some(a.at)
            } else {
                None
            }
        })
    }

    /// Latest departure `σ <= arrival` with `σ + f(σ) <= arrival`.
    ///
    /// The arrival function is non-decreasing, so the answer is found by binary
    /// search over the unrolled breakpoints followed by inverting one segment.
    pub fn latest_departure(&self, arrival: f64) -> f64 {
        if self.is_constant() {
            return arrival - self.points[0].val;
        }
        let n = self.points.len() as isize;
        let base = (arrival / PERIOD).floor() as isize * n;
        let arr = |i: isize| {
            let p = self.unrolled(i);
            p.at + p.val
        };
        // arrivals at unrolled index base - 2n are at most arrival - PERIOD - ...,
        // safely below any target since travel times are shorter than a period
        let (mut lo, mut hi) = (base - 2 * n, base + n);
        debug_assert!(arr(lo) <= arrival);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if arr(mid) <= arrival {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = self.unrolled(lo);
        let b = self.unrolled(lo + 1);
        let (arr_a, arr_b) = (a.at + a.val, b.at + b.val);
        if arr_b <= arrival {
            return b.at;
        }
        if arr_b - arr_a <= 0.0 {
            return a.at;
        }
        a.at + (arrival - arr_a) * (b.at - a.at) / (arr_b - arr_a)
    }

    /// Largest pointwise difference `|self - other|` over a period.
    pub fn max_abs_diff(&self, other: &Ttf) -> f64 {
        let xs = union_departures(self, other);
        let a = self.eval_sorted(&xs);
        let b = other.eval_sorted(&xs);
        a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// Departure interval (within `[0, PERIOD]`) covering every point where the
    /// two functions differ by more than `tolerance`, if any.
    pub fn changed_interval(&self, other: &Ttf, tolerance: f64) -> Option<(f64, f64)> {
        let xs = union_departures(self, other);
        let a = self.eval_sorted(&xs);
        let b = other.eval_sorted(&xs);
        let differs: Vec<bool> = a.iter().zip(&b).map(|(x, y)| (x - y).abs() > tolerance).collect();
        let first = differs.iter().position(|&d| d)?;
        let last = differs.iter().rposition(|&d| d).unwrap();
        // the difference is linear between union points: widen to the neighbours
        let start = if first == 0 { 0.0 } else { xs[first - 1] };
        let end = if last + 1 == xs.len() { PERIOD } else { xs[last + 1] };
        Some((start, end))
    }
}

#[inline]
fn eval_points(points: &[Breakpoint], t: f64, probes: &mut u64) -> f64 {
    if points.len() == 1 {
        *probes += 1;
        return points[0].val;
    }
    let t = period_offset(t);
    let n = points.len();
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        *probes += 1;
        if points[mid].at <= t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    *probes += 2;
    let a = if lo == 0 {
        Breakpoint::new(points[n - 1].at - PERIOD, points[n - 1].val)
    } else {
        points[lo - 1]
    };
    let b = if lo == n {
        Breakpoint::new(points[0].at + PERIOD, points[0].val)
    } else {
        points[lo]
    };
    interpolate(a, b, t)
}

/// Borrowed travel-time function, e.g. a shortcut stored in a shared pool.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtfView<'a> {
    points: &'a [Breakpoint],
    min: f64,
    max: f64,
}

impl<'a> TtfView<'a> {
    /// `points` must form a valid function with the given bounds.
    pub(crate) fn from_parts(points: &'a [Breakpoint], min: f64, max: f64) -> Self {
        TtfView { points, min, max }
    }

    pub fn points(&self) -> &'a [Breakpoint] {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_constant(&self) -> bool {
        self.points.len() == 1
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut probes = 0;
        eval_points(self.points, t, &mut probes)
    }

    pub fn eval_counted(&self, t: f64, probes: &mut u64) -> f64 {
        eval_points(self.points, t, probes)
    }

    pub fn to_ttf(&self) -> Ttf {
        Ttf {
            points: self.points.to_vec(),
            min: self.min,
            max: self.max,
        }
    }
}

pub(crate) fn interpolate(a: Breakpoint, b: Breakpoint, t: f64) -> f64 {
    if b.at == a.at {
        return a.val;
    }
    a.val + (b.val - a.val) * (t - a.at) / (b.at - a.at)
}

/// Sorted, fuzzily deduplicated union of both functions' departures plus 0.
pub(crate) fn union_departures(f: &Ttf, g: &Ttf) -> Vec<f64> {
    let mut xs = Vec::with_capacity(f.len() + g.len() + 1);
    xs.push(0.0);
    let (mut i, mut j) = (0, 0);
    let (fp, gp) = (f.points(), g.points());
    while i < fp.len() || j < gp.len() {
        let x = if j >= gp.len() || (i < fp.len() && fp[i].at <= gp[j].at) {
            i += 1;
            fp[i - 1].at
        } else {
            j += 1;
            gp[j - 1].at
        };
        if !fuzzy_eq(*xs.last().unwrap(), x) {
            xs.push(x);
        }
    }
    xs
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_fifo(rng: &mut ChaCha8Rng, k: usize) -> Ttf {
        let mut deps: Vec<u64> = (0..k).map(|_| rng.gen_range(0..PERIOD as u64)).collect();
        deps.sort_unstable();
        deps.dedup();
        let mut pts: Vec<(u64, u64)> = deps.iter().map(|&d| (d, rng.gen_range(10_000..200_000))).collect();
        // clamp slopes so that travel never drops faster than time passes
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
    }

    /// Oracle: interpolation straight from the raw point list.
    fn reference_eval(points: &[(u64, u64)], t: f64) -> f64 {
        let p: Vec<(f64, f64)> = points.iter().map(|&(a, v)| (a as f64, v as f64)).collect();
        if p.len() == 1 {
            return p[0].1;
        }
        let mut ext = vec![(p[p.len() - 1].0 - PERIOD, p[p.len() - 1].1)];
        ext.extend(p.iter().copied());
        ext.push((p[0].0 + PERIOD, p[0].1));
        let w = ext.windows(2).find(|w| w[0].0 <= t && t <= w[1].0).unwrap();
        w[0].1 + (w[1].1 - w[0].1) * (t - w[0].0) / (w[1].0 - w[0].0)
    }

    #[test]
    fn constant_evaluates_everywhere() {
        let f = Ttf::constant(300_000.0);
        for t in [0.0, 1.0, 43_200_000.0, 86_399_999.0, 1e9] {
            assert_eq!(f.eval(t), 300_000.0);
        }
        assert!(f.is_constant());
    }

    #[test]
    fn midpoint_of_linear_segment() {
        let f = Ttf::from_ms(&[(0, 60_000), (43_200_000, 120_000)]).unwrap();
        assert_eq!(f.eval(21_600_000.0), 90_000.0);
        assert_eq!(f.eval(0.0), 60_000.0);
        assert_eq!(f.eval(43_200_000.0), 120_000.0);
        // wrap segment back down to the first breakpoint
        assert_eq!(f.eval(64_800_000.0), 90_000.0);
        assert_eq!(f.min(), 60_000.0);
        assert_eq!(f.max(), 120_000.0);
    }

    #[test]
    fn matches_independent_interpolation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_fifo(&mut rng, 10);
            let raw: Vec<(u64, u64)> = f.points().iter().map(|p| (p.at as u64, p.val as u64)).collect();
            for _ in 0..1_000 {
                let t = rng.gen_range(0.0..PERIOD);
                assert!((f.eval(t) - reference_eval(&raw, t)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn fifo_violation_detected() {
        assert!(Ttf::constant(5.0).check_fifo());
        let err = Ttf::from_ms(&[(0, 100_000), (1_000, 50_000)]).unwrap_err();
        assert_eq!(err, TtfError::Fifo(0.0));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(Ttf::new(vec![]).unwrap_err(), TtfError::Empty);
        assert!(matches!(Ttf::from_ms(&[(5, 1), (5, 2)]), Err(TtfError::NotIncreasing(1))));
        assert!(matches!(Ttf::from_ms(&[(86_400_000, 1)]), Err(TtfError::OutOfPeriod(_))));
        assert!(matches!(Ttf::from_ms(&[(0, 0)]), Err(TtfError::NonPositive(_))));
    }

    #[test]
    fn latest_departure_inverts_arrival() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let f = random_fifo(&mut rng, 8);
            for _ in 0..100 {
                let arrival = rng.gen_range(0.0..2.0 * PERIOD);
                let sigma = f.latest_departure(arrival);
                assert!(sigma + f.eval(sigma) <= arrival + 1e-5);
                // one millisecond later would be too late unless the arrival function is flat
                assert!(sigma + 1.0 + f.eval(sigma + 1.0) > arrival - 1e-5);
            }
        }
        assert_eq!(Ttf::constant(10.0).latest_departure(100.0), 90.0);
    }

    #[test]
    fn bounds_attained_and_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = random_fifo(&mut rng, 12);
            assert!(f.points().iter().any(|p| p.val == f.min()));
            assert!(f.points().iter().any(|p| p.val == f.max()));
            for _ in 0..200 {
                let v = f.eval(rng.gen_range(0.0..PERIOD));
                assert!(f.min() - 1e-9 <= v && v <= f.max() + 1e-9);
            }
        }
    }

    #[test]
    fn changed_interval_brackets_difference() {
        let f = Ttf::constant(60_000.0);
        let g = Ttf::from_ms(&[(0, 60_000), (1_000_000, 60_000), (1_100_000, 90_000), (1_200_000, 60_000)]).unwrap();
        assert_eq!(f.changed_interval(&f, 0.0), None);
        let (a, b) = f.changed_interval(&g, 1.0).unwrap();
        assert_eq!((a, b), (1_000_000.0, 1_200_000.0));
        assert_eq!(f.max_abs_diff(&g), 30_000.0);
    }
}
