//! Finite-measure unions of tower floors.
//!
//! A [`LevelSet`] names a set of floors of one tower (its home stage). The
//! same subset of the phase space appears in every later tower `J` as the
//! Minkowski sum of the base with the column offsets of stages
//! `home, …, J-1`; refinement computes that representation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::intervals::{IntervalSet, Span};
use crate::tower::StageTable;
use crate::{Error, Int, Rational, Result};

/// Default bound on the number of spans a refinement may produce.
pub const DEFAULT_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelSet {
    home: usize,
    base: IntervalSet,
}

impl LevelSet {
    pub fn empty(home: usize) -> Self {
        Self { home, base: IntervalSet::empty() }
    }

    /// Floors of tower `j` given as closed level intervals.
    pub fn floors(table: &StageTable, j: usize, spans: Vec<Span>) -> Result<Self> {
        let h = table.try_height(j)?;
        for s in &spans {
            if s.lo > s.hi || s.lo < BigInt::zero() || s.hi >= *h {
                return Err(Error::IntervalOutOfRange {
                    stage: j,
                    lo: s.lo.clone(),
                    hi: s.hi.clone(),
                    height: h.clone(),
                });
            }
        }
        Ok(Self { home: j, base: IntervalSet::from_spans(spans) })
    }

    pub fn floor(table: &StageTable, j: usize, level: impl Into<Int>) -> Result<Self> {
        Self::floors(table, j, vec![Span::point(level.into())])
    }

    pub fn floor_range(table: &StageTable, j: usize, lo: impl Into<Int>, hi: impl Into<Int>) -> Result<Self> {
        Self::floors(table, j, vec![Span::new(lo.into(), hi.into())])
    }

    /// The whole tower `X_j`.
    pub fn tower(table: &StageTable, j: usize) -> Result<Self> {
        let h = table.try_height(j)?.clone();
        Self::floors(table, j, vec![Span::new(BigInt::zero(), h - 1)])
    }

    /// Column `i` of tower `j` (one-based), without its spacers, as a set of
    /// floors of tower `j + 1`.
    pub fn column(table: &StageTable, j: usize, i: usize) -> Result<Self> {
        Self::column_span(table, j, i, false)
    }

    /// Column `i` of tower `j` together with the spacers stacked on it.
    pub fn column_with_spacers(table: &StageTable, j: usize, i: usize) -> Result<Self> {
        Self::column_span(table, j, i, true)
    }

    fn column_span(table: &StageTable, j: usize, i: usize, spacers: bool) -> Result<Self> {
        let offsets = table.offsets(j)?;
        if i == 0 || i > offsets.len() {
            return Err(Error::ColumnOutOfRange { stage: j, column: i, r: offsets.len() });
        }
        let start = offsets[i - 1].clone();
        let mut len = table.height(j).clone();
        if spacers {
            len += table.stage_params(j)?.spacer(i);
        }
        let end = &start + len - 1;
        Ok(Self { home: j + 1, base: IntervalSet::from_spans(vec![Span::new(start, end)]) })
    }

    pub fn home(&self) -> usize {
        self.home
    }

    pub fn base(&self) -> &IntervalSet {
        &self.base
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn measure(&self, table: &StageTable) -> Rational {
        Rational::from_integer(self.base.count()) * table.width(self.home)
    }

    /// Level representation in tower `target ≥ home`.
    pub fn flatten(&self, table: &StageTable, target: usize, cap: u128) -> Result<IntervalSet> {
        if target < self.home {
            return Err(Error::RefineBelowHome { target, home: self.home });
        }
        table.try_height(target)?;
        let mut atoms = self.base.atoms() as u128;
        for t in self.home..target {
            atoms = atoms.saturating_mul(table.offsets(t)?.len() as u128);
            if atoms > cap {
                return Err(Error::CapExceeded { stage: target, atoms, cap });
            }
        }
        let mut cur = self.base.clone();
        for t in self.home..target {
            let offsets = table.offsets(t)?;
            let next = cur.minkowski(offsets);
            debug_assert_eq!(next.count(), cur.count() * BigInt::from(offsets.len()));
            cur = next;
        }
        Ok(cur)
    }

    pub fn refine(&self, table: &StageTable, target: usize, cap: u128) -> Result<Self> {
        Ok(Self { home: target, base: self.flatten(table, target, cap)? })
    }

    pub fn intersect(&self, other: &Self, table: &StageTable, cap: u128) -> Result<Self> {
        let home = self.home.max(other.home);
        let a = self.flatten(table, home, cap)?;
        let b = other.flatten(table, home, cap)?;
        Ok(Self { home, base: a.intersect(&b) })
    }

    pub fn union(&self, other: &Self, table: &StageTable, cap: u128) -> Result<Self> {
        let home = self.home.max(other.home);
        let a = self.flatten(table, home, cap)?;
        let b = other.flatten(table, home, cap)?;
        Ok(Self { home, base: a.union(&b) })
    }

    /// Number of levels in the base, if it fits in `u64`.
    pub fn level_count(&self) -> Option<u64> {
        self.base.count().to_u64()
    }
}

impl fmt::Display for LevelSet {
    /// Renders in the set-address grammar, e.g. `2:5-8+2:12`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base.is_empty() {
            return write!(f, "{}:∅", self.home);
        }
        let parts: Vec<String> = self.base.spans().iter().map(|s| format!("{}:{s}", self.home)).collect();
        f.write_str(&parts.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::{p0, t1};
    use crate::params::{ParamSchedule, StageParams};
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn levels(s: &IntervalSet) -> Vec<i64> {
        s.spans()
            .iter()
            .flat_map(|sp| i64::try_from(sp.lo.clone()).unwrap()..=i64::try_from(sp.hi.clone()).unwrap())
            .collect()
    }

    #[test]
    fn floor_examples() {
        let t = StageTable::new(&p0());
        assert_eq!(LevelSet::floor(&t, 1, 0).unwrap().measure(&t), int(1));
        assert_eq!(LevelSet::floor_range(&t, 1, 0, 3).unwrap().measure(&t), int(4));
        assert_eq!(LevelSet::floor(&t, 2, 4).unwrap().measure(&t), ratio(1, 2));
        assert!(matches!(LevelSet::floor(&t, 1, 4), Err(Error::IntervalOutOfRange { .. })));
        assert!(matches!(LevelSet::floor(&t, 4, 0), Err(Error::StageOutOfRange { .. })));
    }

    #[test]
    fn column_examples() {
        let t = StageTable::new(&p0());
        let c2 = LevelSet::column(&t, 1, 2).unwrap();
        assert_eq!((c2.home(), levels(c2.base())), (2, vec![5, 6, 7, 8]));
        assert_eq!(c2.measure(&t), int(2));
        let c1 = LevelSet::column(&t, 1, 1).unwrap();
        assert_eq!(levels(c1.base()), vec![0, 1, 2, 3]);
        assert_eq!(c1.measure(&t), int(2));
        let c1s = LevelSet::column_with_spacers(&t, 1, 1).unwrap();
        assert_eq!(levels(c1s.base()), vec![0, 1, 2, 3, 4]);
        assert!(matches!(LevelSet::column(&t, 1, 3), Err(Error::ColumnOutOfRange { .. })));

        let t = StageTable::new(&t1());
        let c5 = LevelSet::column(&t, 1, 5).unwrap();
        assert_eq!(levels(c5.base()), vec![99, 100, 101, 102]);
        assert_eq!(c5.measure(&t), ratio(4, 5));
    }

    #[test]
    fn refine_examples() {
        let t = StageTable::new(&p0());
        let a = LevelSet::floor(&t, 1, 0).unwrap();
        assert_eq!(levels(&a.flatten(&t, 3, DEFAULT_CAP).unwrap()), vec![0, 5, 9, 14]);
        let x1 = LevelSet::tower(&t, 1).unwrap();
        assert_eq!(levels(&x1.flatten(&t, 2, DEFAULT_CAP).unwrap()), vec![0, 1, 2, 3, 5, 6, 7, 8]);
        assert_eq!(a.refine(&t, 1, DEFAULT_CAP).unwrap(), a);
        assert_eq!(LevelSet::tower(&t, 2).unwrap().measure(&t), ratio(9, 2));
        assert!(matches!(x1.flatten(&t, 3, 3), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn intersect_examples() {
        let t = StageTable::new(&p0());
        let a = LevelSet::floor(&t, 1, 0).unwrap();
        let c2 = LevelSet::column(&t, 1, 2).unwrap();
        let i = a.intersect(&c2, &t, DEFAULT_CAP).unwrap();
        assert_eq!((i.home(), levels(i.base())), (2, vec![5]));
        assert_eq!(i.measure(&t), ratio(1, 2));
        assert_eq!(a.intersect(&a, &t, DEFAULT_CAP).unwrap(), a);
        let other = LevelSet::floor(&t, 1, 1).unwrap();
        assert!(a.intersect(&other, &t, DEFAULT_CAP).unwrap().is_empty());
    }

    type Pairs = Vec<(i64, i64)>;

    fn instance() -> impl Strategy<Value = (ParamSchedule, Pairs, Pairs)> {
        let stages = prop::collection::vec((2usize..5).prop_flat_map(|r| prop::collection::vec(0i64..6, r)), 1..4);
        let spans = || prop::collection::vec((0i64..4, 0i64..4).prop_map(|(a, b)| (a.min(b), a.max(b))), 0..3);
        (stages, spans(), spans()).prop_map(|(stages, a, b)| {
            let stages = stages
                .into_iter()
                .map(|s| StageParams::new(s.len(), s.into_iter().map(BigInt::from).collect()).unwrap())
                .collect();
            (ParamSchedule::new(BigInt::from(4), stages).unwrap(), a, b)
        })
    }

    fn spans(v: &[(i64, i64)]) -> Vec<Span> {
        v.iter().map(|&(a, b)| Span::new(a.into(), b.into())).collect()
    }

    proptest! {
        #[test]
        fn refinement_preserves_measure((sched, a, _) in instance()) {
            let t = StageTable::new(&sched);
            let s = LevelSet::floors(&t, 1, spans(&a)).unwrap();
            for j in 1..=t.last_stage() {
                let flat = s.flatten(&t, j, DEFAULT_CAP).unwrap();
                prop_assert_eq!(Rational::from_integer(flat.count()) * t.width(j), s.measure(&t));
                prop_assert_eq!(s.refine(&t, j, DEFAULT_CAP).unwrap().measure(&t), s.measure(&t));
            }
        }

        #[test]
        fn intersection_laws((sched, a, b) in instance()) {
            let t = StageTable::new(&sched);
            let sa = LevelSet::floors(&t, 1, spans(&a)).unwrap();
            let sb = LevelSet::floors(&t, 1, spans(&b)).unwrap().refine(&t, 2, DEFAULT_CAP).unwrap();
            let ab = sa.intersect(&sb, &t, DEFAULT_CAP).unwrap();
            let ba = sb.intersect(&sa, &t, DEFAULT_CAP).unwrap();
            prop_assert_eq!(&ab, &ba);
            prop_assert!(ab.measure(&t) <= sa.measure(&t).min(sb.measure(&t)));
            prop_assert_eq!(ab.intersect(&ab, &t, DEFAULT_CAP).unwrap(), ab.clone());
        }
    }
}
