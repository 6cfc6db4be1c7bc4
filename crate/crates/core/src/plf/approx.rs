use super::*;

/// Relative error bound for [`approximate`]: the result stays within
/// `±epsilon · f(τ)` of the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxError {
    epsilon: f64,
}

impl ApproxError {
    pub const EXACT: ApproxError = ApproxError { epsilon: 0.0 };

    pub fn new(epsilon: f64) -> Option<Self> {
        (epsilon >= 0.0 && epsilon.is_finite()).then_some(ApproxError { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_exact(&self) -> bool {
        self.epsilon == 0.0
    }
}

/// Slack on the band in milliseconds, absorbing floating point noise so that
/// collinear points are recognised at `epsilon = 0`.
pub(crate) const BAND_SLACK: f64 = 1e-6;

/// Minimum-breakpoint approximation of `f` inside the relative error band.
///
/// Breakpoints are chosen among those of `f`, anchored at its first breakpoint.
/// Chord feasibility is decided by narrowing a window of admissible slopes while
/// scanning forward from each candidate start, and a shortest path over feasible
/// chords yields the minimum count. Since every chord of a FIFO function is FIFO,
/// the result is FIFO; should rounding break that, `f` is returned unchanged.
pub fn approximate(f: &Ttf, err: ApproxError) -> Ttf {
    if f.is_constant() {
        return f.clone();
    }
    let eps = err.epsilon;
    let n = f.len();
    let pts: Vec<Breakpoint> = (0..=n as isize).map(|i| f.unrolled(i)).collect();

    let mut best = vec![usize::MAX; n + 1];
    let mut prev = vec![0usize; n + 1];
    best[0] = 0;
    for i in 0..n {
        if best[i] == usize::MAX {
            continue;
        }
        let a = pts[i];
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for j in i + 1..=n {
            let b = pts[j];
            let dx = b.at - a.at;
            let slope = (b.val - a.val) / dx;
            if slope >= lo && slope <= hi && best[i] + 1 < best[j] {
                best[j] = best[i] + 1;
                prev[j] = i;
            }
            // b becomes an intermediate point for longer chords
            let band = eps * b.val + BAND_SLACK;
            lo = lo.max((b.val - band - a.val) / dx);
            hi = hi.min((b.val + band - a.val) / dx);
            if lo > hi {
                break;
            }
        }
    }

    let mut idx = Vec::with_capacity(best[n]);
    let mut j = n;
    while j != 0 {
        j = prev[j];
        idx.push(j);
    }
    idx.reverse();
    let result = Ttf::from_points_unchecked(idx.into_iter().map(|i| pts[i]).collect());
    if result.check_fifo() {
        result
    } else {
        f.clone()
    }
}
