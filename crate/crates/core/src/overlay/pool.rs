use super::{FunctionRef, OverlayTopology};
use crate::error::{Error, Result};
use crate::network::VertexId;
use crate::plf::{Breakpoint, Ttf, TtfView};

/// One matrix entry of a level pool.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    /// Not yet customized.
    Unset,
    /// `u -> u`, the zero function.
    Diagonal,
    /// No path inside the cell.
    Unreachable,
    Function {
        start: u32,
        len: u32,
        min: f64,
        max: f64,
    },
}

/// Shortcut as seen by searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shortcut<'a> {
    Zero,
    Unreachable,
    Function(TtfView<'a>),
}

impl<'a> Shortcut<'a> {
    pub fn min(&self) -> f64 {
        match self {
            Shortcut::Zero => 0.0,
            Shortcut::Unreachable => f64::INFINITY,
            Shortcut::Function(f) => f.min(),
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            Shortcut::Zero => 0.0,
            Shortcut::Unreachable => f64::INFINITY,
            Shortcut::Function(f) => f.max(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Shortcut::Zero => 0.0,
            Shortcut::Unreachable => f64::INFINITY,
            Shortcut::Function(f) => f.eval(t),
        }
    }

    /// Evaluate, adding the breakpoints touched by the lookup to `probes`.
    pub fn eval_counted(&self, t: f64, probes: &mut u64) -> f64 {
        match self {
            Shortcut::Zero => 0.0,
            Shortcut::Unreachable => f64::INFINITY,
            Shortcut::Function(f) => f.eval_counted(t, probes),
        }
    }

    pub fn to_ttf(&self) -> Option<Ttf> {
        match self {
            Shortcut::Zero => Some(Ttf::zero()),
            Shortcut::Unreachable => None,
            Shortcut::Function(f) => Some(f.to_ttf()),
        }
    }
}

/// Owned slot content used to (re)build a level pool.
#[derive(Debug, Clone, PartialEq)]
pub enum SlotValue {
    Unset,
    Diagonal,
    Unreachable,
    Function(Ttf),
}

/// Shortcut functions of one level. Slots follow the topology layout and the
/// breakpoints of function slots are stored back to back in slot order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevelPool {
    slots: Vec<Slot>,
    points: Vec<Breakpoint>,
}

impl LevelPool {
    pub fn unset(topo: &OverlayTopology, level: usize) -> Self {
        let mut slots = vec![Slot::Unset; topo.slot_count(level)];
        for c in topo.cells(level) {
            for i in 0..c.boundary.len() {
                slots[c.slot(i, i).0 as usize] = Slot::Diagonal;
            }
        }
        LevelPool {
            slots,
            points: Vec::new(),
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = SlotValue>) -> Self {
        let mut pool = LevelPool::default();
        for v in values {
            let slot = match v {
                SlotValue::Unset => Slot::Unset,
                SlotValue::Diagonal => Slot::Diagonal,
                SlotValue::Unreachable => Slot::Unreachable,
                SlotValue::Function(f) => {
                    let start = pool.points.len() as u32;
                    let (min, max) = (f.min(), f.max());
                    pool.points.extend_from_slice(f.points());
                    Slot::Function {
                        start,
                        len: f.len() as u32,
                        min,
                        max,
                    }
                }
            };
            pool.slots.push(slot);
        }
        pool
    }

    /// Raw parts, as stored in snapshots. Layout is checked.
    pub(crate) fn from_parts(slots: Vec<Slot>, points: Vec<Breakpoint>) -> Option<Self> {
        let pool = LevelPool { slots, points };
        pool.check_layout().then_some(pool)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn points(&self) -> &[Breakpoint] {
        &self.points
    }

    /// `None` while the slot is unset.
    #[inline]
    pub fn get(&self, r: FunctionRef) -> Option<Shortcut<'_>> {
        match self.slots[r.0 as usize] {
            Slot::Unset => None,
            Slot::Diagonal => Some(Shortcut::Zero),
            Slot::Unreachable => Some(Shortcut::Unreachable),
            Slot::Function { start, len, min, max } => Some(Shortcut::Function(TtfView::from_parts(
                &self.points[start as usize..(start + len) as usize],
                min,
                max,
            ))),
        }
    }

    pub fn value(&self, r: FunctionRef) -> SlotValue {
        match self.get(r) {
            None => SlotValue::Unset,
            Some(Shortcut::Zero) => SlotValue::Diagonal,
            Some(Shortcut::Unreachable) => SlotValue::Unreachable,
            Some(Shortcut::Function(f)) => SlotValue::Function(f.to_ttf()),
        }
    }

    pub fn values(&self) -> Vec<SlotValue> {
        (0..self.slots.len() as u32).map(|i| self.value(FunctionRef(i))).collect()
    }

    /// Function slots are packed in slot order without gaps.
    pub fn check_layout(&self) -> bool {
        let mut next = 0u32;
        for s in &self.slots {
            if let Slot::Function { start, len, .. } = *s {
                if start != next || len == 0 {
                    return false;
                }
                next += len;
            }
        }
        next as usize == self.points.len()
    }

    pub fn is_complete(&self) -> bool {
        !self.slots.contains(&Slot::Unset)
    }

    /// Total breakpoints, time-dependent slots and function slots.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut bps = 0;
        let mut td = 0;
        let mut functions = 0;
        for s in &self.slots {
            if let Slot::Function { len, .. } = *s {
                bps += len as usize;
                functions += 1;
                if len > 1 {
                    td += 1;
                }
            }
        }
        (bps, td, functions)
    }
}

/// Shortcut functions of all levels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FunctionPool {
    levels: Vec<LevelPool>,
}

impl FunctionPool {
    pub fn unset(topo: &OverlayTopology) -> Self {
        FunctionPool {
            levels: (1..=topo.level_count()).map(|l| LevelPool::unset(topo, l)).collect(),
        }
    }

    pub(crate) fn from_levels(levels: Vec<LevelPool>) -> Self {
        FunctionPool { levels }
    }

    pub fn level(&self, level: usize) -> &LevelPool {
        &self.levels[level - 1]
    }

    pub fn set_level(&mut self, level: usize, pool: LevelPool) {
        self.levels[level - 1] = pool;
    }

    pub fn levels(&self) -> &[LevelPool] {
        &self.levels
    }

    /// Shortcut `u -> v` on `level`.
    pub fn shortcut(&self, topo: &OverlayTopology, level: usize, u: VertexId, v: VertexId) -> Result<Shortcut<'_>> {
        let r = topo.slot(level, u, v)?;
        self.level(level).get(r).ok_or(Error::UnsetSlot { level, from: u, to: v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlay::tests::setup;

    #[test]
    fn unset_before_customization() {
        let (_, _, bs, topo) = setup(8, 8, &[8, 32]);
        let pool = FunctionPool::unset(&topo);
        let cell = &topo.cell(1, 0).boundary;
        let (u, v) = (cell[0], cell[1]);
        assert!(matches!(pool.shortcut(&topo, 1, u, v), Err(Error::UnsetSlot { .. })));
        assert_eq!(pool.shortcut(&topo, 1, u, u).unwrap(), Shortcut::Zero);
        assert!(!bs.level(1).is_empty());
    }

    #[test]
    fn values_round_trip_keeps_layout() {
        let f = Ttf::from_ms(&[(0, 100), (1000, 200)]).unwrap();
        let values = vec![
            SlotValue::Diagonal,
            SlotValue::Function(f.clone()),
            SlotValue::Unreachable,
            SlotValue::Function(Ttf::constant(5.0)),
        ];
        let pool = LevelPool::from_values(values.clone());
        assert!(pool.check_layout());
        assert_eq!(pool.values(), values);
        assert_eq!(pool.counts(), (3, 1, 2));
        assert_eq!(pool.get(FunctionRef(1)).unwrap().eval(500.0), 150.0);
    }
}
