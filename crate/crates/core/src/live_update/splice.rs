use crate::network::VertexId;
use crate::plf::{fuzzy_eq, Breakpoint, Ttf, TtfError, PERIOD};

/// New travel times for one arc on the horizon `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialUpdate {
    pub tail: VertexId,
    pub head: VertexId,
    pub start: f64,
    pub end: f64,
    /// Breakpoints of the partial function; those on the seams are superseded
    /// by the base function.
    pub points: Vec<Breakpoint>,
}

impl PartialUpdate {
    pub fn new(tail: VertexId, head: VertexId, start: f64, end: f64, points: Vec<Breakpoint>) -> Self {
        PartialUpdate {
            tail,
            head,
            start,
            end,
            points,
        }
    }

    /// Horizon inside the period, points inside the horizon, increasing.
    pub fn check(&self) -> Result<(), String> {
        if !(0.0 <= self.start && self.start < self.end && self.end < PERIOD) {
            return Err(format!("horizon [{}, {}] not inside [0, {PERIOD})", self.start, self.end));
        }
        if let Some(p) = self.points.iter().find(|p| p.at < self.start || p.at > self.end) {
            return Err(format!("departure {} outside the horizon", p.at));
        }
        if self.points.windows(2).any(|w| w[0].at >= w[1].at) {
            return Err("departures not strictly increasing".into());
        }
        Ok(())
    }
}

/// Override `base` on the open horizon by the update. Seam breakpoints carry
/// the base values at both horizon ends, so the result stays continuous, and
/// collinear breakpoints are dropped afterwards.
pub fn splice(base: &Ttf, u: &PartialUpdate) -> Result<Ttf, TtfError> {
    let (a, b) = (u.start, u.end);
    let mut points: Vec<Breakpoint> = base.points().iter().copied().filter(|p| p.at < a || p.at > b).collect();
    points.push(Breakpoint::new(a, base.eval(a)));
    points.push(Breakpoint::new(b, base.eval(b)));
    points.extend(u.points.iter().copied().filter(|p| p.at > a && p.at < b));
    points.sort_by(|x, y| x.at.total_cmp(&y.at));
    let spliced = Ttf::new(points)?;
    Ok(drop_collinear(&spliced))
}

/// Remove breakpoints lying on the segment between their neighbours.
pub(crate) fn drop_collinear(f: &Ttf) -> Ttf {
    let n = f.len();
    if n < 3 {
        return f.clone();
    }
    let mut keep = vec![true; n];
    // previous kept point, unrolled so that it lies before the current one
    let mut prev = f.unrolled(-1);
    for (i, kept) in keep.iter_mut().enumerate() {
        let p = f.unrolled(i as isize);
        let next = f.unrolled(i as isize + 1);
        let on_line = prev.val + (next.val - prev.val) * (p.at - prev.at) / (next.at - prev.at);
        if fuzzy_eq(on_line, p.val) {
            *kept = false;
        } else {
            prev = p;
        }
    }
    if keep.iter().all(|&k| k) {
        return f.clone();
    }
    let points: Vec<Breakpoint> = f.points().iter().zip(&keep).filter(|(_, &k)| k).map(|(p, _)| *p).collect();
    if points.is_empty() {
        // all collinear around the period: constant
        return Ttf::constant(f.points()[0].val);
    }
    Ttf::from_points_unchecked(points)
}
