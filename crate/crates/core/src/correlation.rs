//! Exact set correlations `μ(A ∩ TᵐB)` and inner products of shifted
//! indicator combinations.
//!
//! A point of `B` sitting at level `b` of tower `K` is carried by `Tᵐ` to
//! level `b + m` of the same tower whenever `b + m < h_K`, and stays there in
//! every later tower. So the resolved part of the correlation at stage `K` is
//! the number of pairs `(a, b)` of representation levels with `a - b = m`,
//! times the floor width `w_K`. Representations are iterated Minkowski sums
//! `base + O_t0 + … + O_{K-1}` with unique decomposition, so the pair count
//! satisfies the carry recursion
//!
//! ```text
//! N_K(d) = Σ_{i,i'} N_{K-1}(d - (o[i'] - o[i])),    N_K(d) = 0 for |d| ≥ h_K
//! ```
//!
//! over the offset differences of stage `K - 1`. A pair that is not resolved
//! at stage `K` has `b + m ≥ h_K` (the point of `B` leaves through the top)
//! and `a < m` (its image in `A` came in through the bottom), so the smaller
//! of those two level counts bounds the missing mass. Both counts obey the
//! same kind of recursion on a threshold. The stage is deepened until the
//! bound vanishes or the built stages run out, in which case it is reported
//! as `unresolved`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exec::Exec;
use crate::intervals::IntervalSet;
use crate::levelset::{LevelSet, DEFAULT_CAP};
use crate::rational::fmt_ratio;
use crate::tower::StageTable;
use crate::{Error, Int, Rational, Result};

/// A value known to lie in `[lo, lo + unresolved]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrelationResult {
    pub lo: Rational,
    pub unresolved: Rational,
}

impl CorrelationResult {
    pub fn exact(value: Rational) -> Self {
        Self { lo: value, unresolved: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.unresolved.is_zero()
    }

    /// The value, when exact.
    pub fn value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn hi(&self) -> Rational {
        &self.lo + &self.unresolved
    }

    fn from_bounds(lo: Rational, hi: Rational) -> Self {
        let unresolved = &hi - &lo;
        Self { lo, unresolved }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { lo: &self.lo + &other.lo, unresolved: &self.unresolved + &other.unresolved }
    }

    pub fn neg(&self) -> Self {
        Self::from_bounds(-self.hi(), -&self.lo)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_negative() {
            Self::from_bounds(c * self.hi(), c * &self.lo)
        } else {
            Self { lo: c * &self.lo, unresolved: c * &self.unresolved }
        }
    }

    /// Interval product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact() && other.is_exact() {
            return Self::exact(&self.lo * &other.lo);
        }
        let (a, b) = (self.hi(), other.hi());
        let prods = [&self.lo * &other.lo, &self.lo * &b, &a * &other.lo, &a * &b];
        let lo = prods.iter().min().unwrap().clone();
        let hi = prods.iter().max().unwrap().clone();
        Self::from_bounds(lo, hi)
    }
}

impl fmt::Display for CorrelationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            f.write_str(&fmt_ratio(&self.lo))
        } else {
            write!(f, "[{}, {}]", fmt_ratio(&self.lo), fmt_ratio(&self.hi()))
        }
    }
}

/// `μ(A ∩ TᵐB)` with the default refinement cap.
pub fn correlate(table: &StageTable, a: &LevelSet, b: &LevelSet, m: &Int) -> Result<CorrelationResult> {
    correlate_with_cap(table, a, b, m, DEFAULT_CAP)
}

pub fn correlate_with_cap(
    table: &StageTable,
    a: &LevelSet,
    b: &LevelSet,
    m: &Int,
    cap: u128,
) -> Result<CorrelationResult> {
    if m.is_negative() {
        return correlate_with_cap(table, b, a, &-m, cap);
    }
    let t0 = a.home().max(b.home());
    let first = table
        .first_stage_above(t0, m)
        .ok_or_else(|| Error::NoStageAbove { m: m.clone(), tallest: table.height(table.last_stage()).clone() })?;
    if a.is_empty() || b.is_empty() {
        return Ok(CorrelationResult::zero());
    }
    let mut dp = CarryCount::new(table, a.flatten(table, t0, cap)?, b.flatten(table, t0, cap)?, t0);
    let last = table.last_stage();
    for k in first..=last {
        // Unresolved pairs have b + m ≥ h_K on the B side and a < m on the A side.
        let up = dp.count_at_least(Side::B, k, &(table.height(k) - m));
        let down = dp.total(Side::A, k) - dp.count_at_least(Side::A, k, m);
        let leaving = up.min(down);
        if leaving.is_zero() || k == last {
            let w = table.width(k);
            let lo = Rational::from_integer(dp.pairs(k, m)) * w;
            let unresolved = Rational::from_integer(leaving) * w;
            return Ok(CorrelationResult { lo, unresolved });
        }
    }
    unreachable!("loop always returns at the last stage")
}

/// Memoized pair and threshold counts over Minkowski-sum representations,
/// starting from both sets refined to stage `t0`.
struct CarryCount<'a> {
    table: &'a StageTable,
    a0: IntervalSet,
    b0: IntervalSet,
    t0: usize,
    /// Sorted offset differences `o[i'] - o[i]` with multiplicity, per stage.
    diffs: HashMap<usize, Vec<(Int, u64)>>,
    pair_memo: HashMap<(usize, Int), Int>,
    exit_memo: HashMap<(Side, usize, Int), Int>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    A,
    B,
}

impl<'a> CarryCount<'a> {
    fn new(table: &'a StageTable, a0: IntervalSet, b0: IntervalSet, t0: usize) -> Self {
        Self { table, a0, b0, t0, diffs: HashMap::new(), pair_memo: HashMap::new(), exit_memo: HashMap::new() }
    }

    fn diffs(&mut self, t: usize) -> &[(Int, u64)] {
        let table = self.table;
        self.diffs.entry(t).or_insert_with(|| {
            let o = table.offsets(t).expect("stage below a built tower has columns");
            let mut all: Vec<Int> = o.iter().flat_map(|x| o.iter().map(move |y| x - y)).collect();
            all.sort();
            let mut out: Vec<(Int, u64)> = Vec::new();
            for d in all {
                match out.last_mut() {
                    Some((v, c)) if *v == d => *c += 1,
                    _ => out.push((d, 1)),
                }
            }
            out
        })
    }

    /// Number of `(a, b)` in the stage-`t` representations with `a - b = d`.
    fn pairs(&mut self, t: usize, d: &Int) -> Int {
        if t == self.t0 {
            return self.a0.overlap_with_shift(&self.b0, d);
        }
        if d.abs() >= *self.table.height(t) {
            return BigInt::zero();
        }
        if let Some(v) = self.pair_memo.get(&(t, d.clone())) {
            return v.clone();
        }
        let below = self.table.height(t - 1).clone();
        let lo = d - &below;
        let hi = d + &below;
        let diffs = self.diffs(t - 1);
        let start = diffs.partition_point(|(x, _)| *x <= lo);
        let end = diffs.partition_point(|(x, _)| *x < hi);
        let terms: Vec<(Int, u64)> = diffs[start..end].to_vec();
        let mut total = BigInt::zero();
        for (delta, mult) in terms {
            let sub = self.pairs(t - 1, &(d - delta));
            if !sub.is_zero() {
                total += sub * BigInt::from(mult);
            }
        }
        self.pair_memo.insert((t, d.clone()), total.clone());
        total
    }

    fn total(&self, side: Side, t: usize) -> Int {
        let base = match side {
            Side::A => self.a0.count(),
            Side::B => self.b0.count(),
        };
        (self.t0..t).fold(base, |acc, s| acc * BigInt::from(self.table.offsets(s).map_or(1, <[Int]>::len)))
    }

    /// Levels of one set's stage-`t` representation at or above `threshold`.
    fn count_at_least(&mut self, side: Side, t: usize, threshold: &Int) -> Int {
        if t == self.t0 {
            return match side {
                Side::A => self.a0.count_at_least(threshold),
                Side::B => self.b0.count_at_least(threshold),
            };
        }
        if *threshold >= *self.table.height(t) {
            return BigInt::zero();
        }
        if !threshold.is_positive() {
            return self.total(side, t);
        }
        let key = (side, t, threshold.clone());
        if let Some(v) = self.exit_memo.get(&key) {
            return v.clone();
        }
        let offsets = self.table.offsets(t - 1).expect("columns exist below a built tower").to_vec();
        let total = offsets.iter().map(|o| self.count_at_least(side, t - 1, &(threshold - o))).sum::<Int>();
        self.exit_memo.insert(key, total.clone());
        total
    }
}

/// Brute-force `μ(A ∩ TᵐB)`: both sets flattened to stage `stage`, every
/// level of `B` shifted by `m` and looked up in `A`.
pub fn oracle_correlate(table: &StageTable, a: &LevelSet, b: &LevelSet, m: &Int, stage: usize) -> Result<Rational> {
    oracle_correlate_with_cap(table, a, b, m, stage, DEFAULT_CAP)
}

pub fn oracle_correlate_with_cap(
    table: &StageTable,
    a: &LevelSet,
    b: &LevelSet,
    m: &Int,
    stage: usize,
    cap: u128,
) -> Result<Rational> {
    let fa = a.flatten(table, stage, cap)?;
    let fb = b.flatten(table, stage, cap)?;
    let h = table.height(stage);
    let shallow = || Error::ShallowStage { stage, m: m.clone(), height: h.clone() };
    if let (Some(lo), Some(hi)) = (fb.min(), fb.max()) {
        if (lo + m).is_negative() || hi + m >= *h {
            return Err(shallow());
        }
    }
    let levels = fb.count().to_u128().unwrap_or(u128::MAX);
    if levels > cap {
        return Err(Error::CapExceeded { stage, atoms: levels, cap });
    }
    let mut hits = 0u64;
    for span in fb.spans() {
        let mut l = span.lo.clone();
        while l <= span.hi {
            if fa.contains(&(&l + m)) {
                hits += 1;
            }
            l += 1;
        }
    }
    Ok(Rational::from_integer(BigInt::from(hits)) * table.width(stage))
}

/// One term `coef · 1_{T^shift S}` of a [`ShiftedCombo`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: Rational,
    pub shift: Int,
    pub set: LevelSet,
}

/// Finite rational combination `Σ c · 1_{TᵏS}` in `L²(μ)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ShiftedCombo {
    terms: Vec<Term>,
}

impl ShiftedCombo {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn indicator(set: LevelSet) -> Self {
        Self::term(Rational::from_integer(BigInt::from(1)), BigInt::zero(), set)
    }

    pub fn term(coef: Rational, shift: Int, set: LevelSet) -> Self {
        Self { terms: vec![Term { coef, shift, set }] }
    }

    /// `(I + T^{-n}) 1_S`.
    pub fn with_back_shift(set: LevelSet, n: &Int) -> Self {
        let one = Self::indicator(set);
        one.plus(&one.shifted(&-n))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `Tᵏ` applied to the whole combination.
    pub fn shifted(&self, k: &Int) -> Self {
        let terms = self.terms.iter().map(|t| Term { shift: &t.shift + k, ..t.clone() }).collect();
        Self { terms }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let terms = self.terms.iter().map(|t| Term { coef: &t.coef * c, ..t.clone() }).collect();
        Self { terms }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }
}

/// `⟨u, v⟩` via bilinear expansion; each pair reduces to one correlation
/// through `⟨TᵏS, TˡR⟩ = μ(S ∩ T^{l-k}R)`.
pub fn inner(table: &StageTable, u: &ShiftedCombo, v: &ShiftedCombo) -> Result<CorrelationResult> {
    inner_with(table, u, v, Exec::Sequential)
}

pub fn inner_with(table: &StageTable, u: &ShiftedCombo, v: &ShiftedCombo, exec: Exec) -> Result<CorrelationResult> {
    let grid: Vec<(&Term, &Term)> = u.terms.iter().flat_map(|p| v.terms.iter().map(move |q| (p, q))).collect();
    let parts = exec.map(&grid, |(p, q)| {
        if p.coef.is_zero() || q.coef.is_zero() {
            return Ok(CorrelationResult::zero());
        }
        let c = correlate(table, &p.set, &q.set, &(&q.shift - &p.shift))?;
        Ok(c.scale(&(&p.coef * &q.coef)))
    });
    parts.into_iter().try_fold(CorrelationResult::zero(), |acc, r: Result<_>| Ok(acc.add(&r?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::{p0, t1};
    use crate::rational::{int, ratio};

    fn a(t: &StageTable) -> LevelSet {
        LevelSet::floor(t, 1, 0).unwrap()
    }

    fn m(v: i64) -> Int {
        BigInt::from(v)
    }

    #[test]
    fn p0_examples() {
        let t = StageTable::new(&p0());
        let a = a(&t);
        assert_eq!(correlate(&t, &a, &a, &m(0)).unwrap(), CorrelationResult::exact(int(1)));
        assert_eq!(correlate(&t, &a, &a, &m(5)).unwrap(), CorrelationResult::exact(ratio(1, 2)));
        assert_eq!(correlate(&t, &a, &a, &m(4)).unwrap(), CorrelationResult::exact(ratio(1, 4)));
        let r = correlate(&t, &a, &a, &m(9)).unwrap();
        assert_eq!((r.lo, r.unresolved), (ratio(1, 2), ratio(1, 4)));
        assert!(matches!(correlate(&t, &a, &a, &m(20)), Err(Error::NoStageAbove { .. })));
    }

    #[test]
    fn oracle_examples() {
        let t = StageTable::new(&p0());
        let a = a(&t);
        assert_eq!(oracle_correlate(&t, &a, &a, &m(5), 3).unwrap(), ratio(1, 2));
        assert_eq!(oracle_correlate(&t, &a, &a, &m(4), 3).unwrap(), ratio(1, 4));
        let other = LevelSet::floor(&t, 1, 2).unwrap();
        assert_eq!(oracle_correlate(&t, &a, &other, &m(0), 1).unwrap(), int(0));
        for j in 1..=3 {
            assert_eq!(oracle_correlate(&t, &a, &a, &m(0), j).unwrap(), int(1));
        }
        assert!(matches!(oracle_correlate(&t, &a, &a, &m(9), 3), Err(Error::ShallowStage { .. })));
    }

    #[test]
    fn dp_matches_oracle_on_p0() {
        let t = StageTable::new(&p0());
        let a = a(&t);
        let x1 = LevelSet::tower(&t, 1).unwrap();
        for (s, u) in [(&a, &a), (&a, &x1), (&x1, &a), (&x1, &x1)] {
            for shift in -12..=12 {
                if let Ok(o) = oracle_correlate(&t, s, u, &m(shift), 3) {
                    let c = correlate(&t, s, u, &m(shift)).unwrap();
                    assert_eq!(c, CorrelationResult::exact(o), "m={shift}");
                }
            }
        }
    }

    #[test]
    fn negative_shift_swaps_arguments() {
        let t = StageTable::new(&t1());
        let a = a(&t);
        let b = LevelSet::floor(&t, 1, 2).unwrap();
        for k in [1, 7, 90, 300] {
            assert_eq!(correlate(&t, &a, &b, &m(-k)).unwrap(), correlate(&t, &b, &a, &m(k)).unwrap());
        }
    }

    #[test]
    fn inner_examples() {
        let t = StageTable::new(&t1());
        let a = a(&t);
        let v = ShiftedCombo::with_back_shift(a.clone(), &m(3));
        assert_eq!(inner(&t, &v, &v).unwrap(), CorrelationResult::exact(int(2)));
        let ia = ShiftedCombo::indicator(a.clone());
        assert_eq!(inner(&t, &ia, &ia).unwrap(), CorrelationResult::exact(int(1)));
        let s7 = ia.shifted(&m(7));
        assert_eq!(inner(&t, &s7, &s7).unwrap(), CorrelationResult::exact(int(1)));
        assert_eq!(inner(&t, &ShiftedCombo::zero(), &v).unwrap(), CorrelationResult::zero());
    }

    #[test]
    fn interval_arithmetic() {
        let x = CorrelationResult { lo: int(1), unresolved: int(2) };
        let y = CorrelationResult { lo: int(-1), unresolved: int(1) };
        let p = x.mul(&y);
        assert_eq!((p.lo.clone(), p.hi()), (int(-3), int(0)));
        let s = x.scale(&int(-2));
        assert_eq!((s.lo.clone(), s.hi()), (int(-6), int(-2)));
        assert_eq!(x.neg().hi(), int(-1));
    }
}
