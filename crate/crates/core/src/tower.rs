//! Per-stage tower geometry.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::params::{ParamSchedule, StageParams};
use crate::{Error, Int, Rational, Result};

/// Heights, column offsets, floor widths and tower measures of every built
/// stage. Stages are numbered from 1; a schedule with `N` stages yields
/// towers `1..=N+1`, of which `1..=N` carry column structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTable {
    schedule: ParamSchedule,
    heights: Vec<Int>,
    offsets: Vec<Vec<Int>>,
    widths: Vec<Rational>,
    measures: Vec<Rational>,
}

impl StageTable {
    /// Table with unit-width floors in tower 1.
    pub fn new(schedule: &ParamSchedule) -> Self {
        build_stages(schedule, &Rational::one())
    }

    pub fn schedule(&self) -> &ParamSchedule {
        &self.schedule
    }

    /// Number of built towers, `N + 1`.
    pub fn last_stage(&self) -> usize {
        self.heights.len()
    }

    /// Last stage whose columns (and hence refinement offsets) are known.
    pub fn last_parameterized(&self) -> usize {
        self.offsets.len()
    }

    fn check(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.last_stage() {
            Err(Error::StageOutOfRange { stage: j, last: self.last_stage() })
        } else {
            Ok(j - 1)
        }
    }

    pub fn height(&self, j: usize) -> &Int {
        &self.heights[j - 1]
    }

    pub fn try_height(&self, j: usize) -> Result<&Int> {
        Ok(&self.heights[self.check(j)?])
    }

    pub fn heights(&self) -> &[Int] {
        &self.heights
    }

    /// Where column `i` of tower `j` starts inside tower `j + 1`, for `i = 1..=r_j`
    /// (stored zero-based).
    pub fn offsets(&self, j: usize) -> Result<&[Int]> {
        self.check(j)?;
        self.offsets.get(j - 1).map(Vec::as_slice).ok_or(Error::NoColumns { stage: j, last: self.last_parameterized() })
    }

    pub fn stage_params(&self, j: usize) -> Result<&StageParams> {
        self.schedule.stage(j).ok_or(Error::NoColumns { stage: j, last: self.last_parameterized() })
    }

    /// Measure of a single floor of tower `j`.
    pub fn width(&self, j: usize) -> &Rational {
        &self.widths[j - 1]
    }

    /// Measure of the whole tower `X_j`.
    pub fn tower_measure(&self, j: usize) -> &Rational {
        &self.measures[j - 1]
    }

    /// Smallest built stage `J ≥ from` with `h_J > m`.
    pub fn first_stage_above(&self, from: usize, m: &Int) -> Option<usize> {
        (from.max(1)..=self.last_stage()).find(|&j| self.height(j) > m)
    }
}

/// Computes the table exactly from a schedule and the measure of the first base floor.
pub fn build_stages(schedule: &ParamSchedule, base_measure: &Rational) -> StageTable {
    let n = schedule.len();
    let mut heights = Vec::with_capacity(n + 1);
    let mut offsets = Vec::with_capacity(n);
    let mut widths = Vec::with_capacity(n + 1);
    let mut measures = Vec::with_capacity(n + 1);

    heights.push(schedule.h1().clone());
    widths.push(base_measure.clone());
    measures.push(base_measure * Rational::from_integer(schedule.h1().clone()));

    for st in schedule.stages() {
        let h = heights.last().unwrap().clone();
        let mut o = Vec::with_capacity(st.r());
        let mut next = BigInt::zero();
        for s in st.spacers() {
            o.push(next.clone());
            next += &h + s;
        }
        let w = widths.last().unwrap() / Rational::from_integer(BigInt::from(st.r()));
        let mu = measures.last().unwrap() + &w * Rational::from_integer(st.spacer_total());
        heights.push(next);
        offsets.push(o);
        widths.push(w);
        measures.push(mu);
    }

    StageTable { schedule: schedule.clone(), heights, offsets, widths, measures }
}

/// Partial sums of `Σ_j (Σ_i s_j(i)) / (h_j r_j)` over the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureDiagnostic {
    pub terms: Vec<Rational>,
    pub partial_sum: Rational,
}

pub fn infinite_measure_diagnostic(table: &StageTable) -> MeasureDiagnostic {
    let terms: Vec<Rational> = table
        .schedule
        .stages()
        .iter()
        .enumerate()
        .map(|(k, st)| Rational::new(st.spacer_total(), &table.heights[k] * BigInt::from(st.r())))
        .collect();
    let partial_sum = terms.iter().sum();
    MeasureDiagnostic { terms, partial_sum }
}
