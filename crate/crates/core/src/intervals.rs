//! Sorted, disjoint, coalesced sets of integer intervals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Int;

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub lo: Int,
    pub hi: Int,
}

impl Span {
    pub fn new(lo: Int, hi: Int) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(l: Int) -> Self {
        Self { hi: l.clone(), lo: l }
    }

    pub fn len(&self) -> Int {
        &self.hi - &self.lo + BigInt::one()
    }

    pub fn shifted(&self, by: &Int) -> Self {
        Self { lo: &self.lo + by, hi: &self.hi + by }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

/// Invariant: spans sorted by `lo`, pairwise disjoint and non-adjacent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    spans: Vec<Span>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Normalizes arbitrary (possibly overlapping, unsorted) spans.
    pub fn from_spans(mut spans: Vec<Span>) -> Self {
        spans.sort();
        let mut out: Vec<Span> = Vec::with_capacity(spans.len());
        for s in spans {
            match out.last_mut() {
                Some(last) if s.lo <= &last.hi + BigInt::one() => {
                    if s.hi > last.hi {
                        last.hi = s.hi;
                    }
                }
                _ => out.push(s),
            }
        }
        Self { spans: out }
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Number of maximal spans.
    pub fn atoms(&self) -> usize {
        self.spans.len()
    }

    /// Number of integers in the set.
    pub fn count(&self) -> Int {
        self.spans.iter().map(Span::len).sum()
    }

    pub fn min(&self) -> Option<&Int> {
        self.spans.first().map(|s| &s.lo)
    }

    pub fn max(&self) -> Option<&Int> {
        self.spans.last().map(|s| &s.hi)
    }

    pub fn contains(&self, l: &Int) -> bool {
        let k = self.spans.partition_point(|s| s.hi < *l);
        self.spans.get(k).is_some_and(|s| s.lo <= *l)
    }

    pub fn shifted(&self, by: &Int) -> Self {
        Self { spans: self.spans.iter().map(|s| s.shifted(by)).collect() }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.spans, &other.spans);
        let (mut i, mut k) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && k < b.len() {
            let lo = (&a[i].lo).max(&b[k].lo);
            let hi = (&a[i].hi).min(&b[k].hi);
            if lo <= hi {
                out.push(Span::new(lo.clone(), hi.clone()));
            }
            if a[i].hi < b[k].hi {
                i += 1;
            } else {
                k += 1;
            }
        }
        Self { spans: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_spans(self.spans.iter().chain(&other.spans).cloned().collect())
    }

    /// Number of common integers between `self` and `other` shifted by `by`,
    /// without materializing the intersection.
    pub fn overlap_with_shift(&self, other: &Self, by: &Int) -> Int {
        let (a, b) = (&self.spans, &other.spans);
        let (mut i, mut k) = (0, 0);
        let mut total = BigInt::zero();
        while i < a.len() && k < b.len() {
            let blo = &b[k].lo + by;
            let bhi = &b[k].hi + by;
            let lo = (&a[i].lo).max(&blo);
            let hi = (&a[i].hi).min(&bhi);
            if lo <= hi {
                total += hi - lo + BigInt::one();
            }
            if a[i].hi < bhi {
                i += 1;
            } else {
                k += 1;
            }
        }
        total
    }

    /// Number of elements `≥ threshold`.
    pub fn count_at_least(&self, threshold: &Int) -> Int {
        self.spans
            .iter()
            .filter(|s| s.hi >= *threshold)
            .map(|s| if s.lo >= *threshold { s.len() } else { &s.hi - threshold + BigInt::one() })
            .sum()
    }

    /// Minkowski sum with a strictly increasing offset list whose gaps are at
    /// least `period`, every element of `self` lying in `[0, period)`. The
    /// result is duplicate-free: its count is `count() * offsets.len()`.
    pub fn minkowski(&self, offsets: &[Int]) -> Self {
        let mut spans = Vec::with_capacity(self.spans.len() * offsets.len());
        for o in offsets {
            spans.extend(self.spans.iter().map(|s| s.shifted(o)));
        }
        Self::from_spans(spans)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.spans.iter().map(Span::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
