//! Construction parameters: parsing, serialization, class membership checks,
//! the index sets `J(r, n)` and the minimal-growth generator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{Map, Value};

use crate::{Error, Int, Result};

/// Parameters of one cutting-and-stacking stage: `r` columns and one spacer
/// count per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StageParams {
    r: usize,
    s: Vec<Int>,
}

impl StageParams {
    pub fn new(r: usize, s: Vec<Int>) -> Result<Self> {
        Self::checked(r, s, "stage")
    }

    fn checked(r: usize, s: Vec<Int>, location: &str) -> Result<Self> {
        if s.len() != r {
            return Err(Error::SpacerLength { location: location.to_string(), len: s.len(), r });
        }
        if r < 2 {
            return Err(Error::TooFewColumns { location: location.to_string(), r });
        }
        if let Some((i, v)) = s.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::NegativeSpacer { location: format!("{location}.s[{i}]"), value: v.clone() });
        }
        Ok(Self { r, s })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Spacers in column order, `s[0]` being the spacer above column 1.
    pub fn spacers(&self) -> &[Int] {
        &self.s
    }

    /// One-based spacer access, matching the column numbering `1..=r`.
    pub fn spacer(&self, i: usize) -> &Int {
        &self.s[i - 1]
    }

    pub fn spacer_total(&self) -> Int {
        self.s.iter().sum()
    }

    /// The spacer above the next-to-last column, the `n` in `J(r, n)`.
    pub fn gap(&self) -> &Int {
        self.spacer(self.r - 1)
    }
}

/// Initial height plus the ordered stage parameters. Stage `j` is
/// `stages()[j - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamSchedule {
    h1: Int,
    stages: Vec<StageParams>,
}

impl ParamSchedule {
    pub fn new(h1: Int, stages: Vec<StageParams>) -> Result<Self> {
        if h1 < BigInt::from(4) {
            return Err(Error::InitialHeight(h1));
        }
        if stages.is_empty() {
            return Err(Error::EmptySchedule);
        }
        Ok(Self { h1, stages })
    }

    pub fn h1(&self) -> &Int {
        &self.h1
    }

    pub fn stages(&self) -> &[StageParams] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// One-based stage access.
    pub fn stage(&self, j: usize) -> Option<&StageParams> {
        j.checked_sub(1).and_then(|k| self.stages.get(k))
    }

    /// The first `n` stages (at least one).
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.clamp(1, self.stages.len());
        Self { h1: self.h1.clone(), stages: self.stages[..n].to_vec() }
    }

    /// Heights `h_1, …, h_{N+1}` via `h_{j+1} = h_j r_j + Σ s_j(i)`.
    pub fn heights(&self) -> Vec<Int> {
        let mut hs = Vec::with_capacity(self.stages.len() + 1);
        hs.push(self.h1.clone());
        for st in &self.stages {
            let h = hs.last().unwrap();
            hs.push(h * BigInt::from(st.r) + st.spacer_total());
        }
        hs
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Document {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let obj = doc.as_object().ok_or_else(|| doc_err("$", "expected an object"))?;
        let h1 = parse_int(obj.get("h1").ok_or_else(|| doc_err("$", "missing field h1"))?, "h1")?;
        let stages = obj
            .get("stages")
            .ok_or_else(|| doc_err("$", "missing field stages"))?
            .as_array()
            .ok_or_else(|| doc_err("stages", "expected an array"))?;
        let mut parsed = Vec::with_capacity(stages.len());
        for (k, st) in stages.iter().enumerate() {
            let loc = format!("stages[{k}]");
            let st = st.as_object().ok_or_else(|| doc_err(&loc, "expected an object"))?;
            let r = parse_int(st.get("r").ok_or_else(|| doc_err(&loc, "missing field r"))?, &format!("{loc}.r"))?;
            let r = r.to_usize().ok_or_else(|| doc_err(&format!("{loc}.r"), "r out of range"))?;
            let s = st
                .get("s")
                .ok_or_else(|| doc_err(&loc, "missing field s"))?
                .as_array()
                .ok_or_else(|| doc_err(&format!("{loc}.s"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, v)| parse_int(v, &format!("{loc}.s[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            parsed.push(StageParams::checked(r, s, &loc)?);
        }
        Self::new(h1, parsed)
    }

    /// Serializes to the JSON parameter document. Integers beyond `u64`
    /// are written as decimal strings.
    pub fn to_json(&self) -> String {
        let stages = self
            .stages
            .iter()
            .map(|st| {
                let mut m = Map::new();
                m.insert("r".into(), Value::from(st.r as u64));
                m.insert("s".into(), Value::Array(st.s.iter().map(int_value).collect()));
                Value::Object(m)
            })
            .collect();
        let mut m = Map::new();
        m.insert("h1".into(), int_value(&self.h1));
        m.insert("stages".into(), Value::Array(stages));
        let mut out = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
        out.push('\n');
        out
    }
}

fn doc_err(location: &str, message: &str) -> Error {
    Error::Document { location: location.to_string(), message: message.to_string() }
}

fn parse_int(v: &Value, location: &str) -> Result<Int> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(doc_err(location, "expected an integer"))
            }
        }
        Value::String(s) => {
            s.trim().parse::<BigInt>().map_err(|_| doc_err(location, "expected a decimal integer string"))
        }
        _ => Err(doc_err(location, "expected an integer")),
    }
}

fn int_value(v: &Int) -> Value {
    match v.to_u64() {
        Some(u) => Value::from(u),
        None => Value::String(v.to_string()),
    }
}

/// Stages `j` (one-based, ascending) with `r_j = r` and `s_j(r_j - 1) = n`.
pub fn j_set(sched: &ParamSchedule, r: usize, n: &Int) -> Vec<usize> {
    sched.stages.iter().enumerate().filter(|(_, st)| st.r == r && st.gap() == n).map(|(k, _)| k + 1).collect()
}

/// The per-stage conditions defining the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// `r_1 > 4`, checked at stage 1 only.
    FirstColumnsAboveFour,
    /// `r_{j-1} ≤ r_j`, checked from stage 2 on.
    ColumnsNondecreasing,
    /// `s_j(r_j - 1) ≤ r_j`, i.e. `J(r, n) = ∅` whenever `r < n`.
    GapAtMostColumns,
    /// `s_j(1) ≥ 4 h_j`.
    FirstSpacer,
    /// `s_j(i) ≥ 4 s_j(i - 1)` for `i = 2, …, r_j - 3`.
    InteriorGrowth,
    /// `s_j(r_j - 2) = 0`.
    ZeroBeforeGap,
    /// `s_j(r_j) ≥ 4 s_j(r_j - 3)`.
    LastSpacer,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::FirstColumnsAboveFour,
        Condition::ColumnsNondecreasing,
        Condition::GapAtMostColumns,
        Condition::FirstSpacer,
        Condition::InteriorGrowth,
        Condition::ZeroBeforeGap,
        Condition::LastSpacer,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Condition::FirstColumnsAboveFour => "r₁ > 4",
            Condition::ColumnsNondecreasing => "rⱼ nondecreasing",
            Condition::GapAtMostColumns => "sⱼ(rⱼ−1) ≤ rⱼ",
            Condition::FirstSpacer => "sⱼ(1) ≥ 4hⱼ",
            Condition::InteriorGrowth => "sⱼ(i) ≥ 4sⱼ(i−1)",
            Condition::ZeroBeforeGap => "sⱼ(rⱼ−2)=0",
            Condition::LastSpacer => "sⱼ(rⱼ) ≥ 4sⱼ(rⱼ−3)",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// The condition's index range is empty at this stage.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionEntry {
    pub condition: Condition,
    pub stage: usize,
    pub outcome: Outcome,
    pub witness: String,
}

/// Outcome of [`check_t2`] on a finite schedule prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub entries: Vec<ConditionEntry>,
    /// Distinct column counts in the prefix.
    pub r_values: BTreeSet<usize>,
    /// Integers in `[r_1, max r_j]` that never occur as a column count.
    pub r_missing: Vec<usize>,
    /// `|J(r, n)|` for every `(r, n)` occurring in the prefix.
    pub j_counts: BTreeMap<(usize, Int), usize>,
    pub notes: Vec<String>,
}

impl ClassReport {
    pub fn failures(&self) -> impl Iterator<Item = &ConditionEntry> {
        self.entries.iter().filter(|e| e.outcome == Outcome::Fail)
    }

    /// True when every per-stage condition holds; asymptotic conditions are
    /// never part of the verdict.
    pub fn prefix_consistent(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn entry(&self, condition: Condition, stage: usize) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.condition == condition && e.stage == stage)
    }
}

/// Evaluates every per-stage class condition exactly and collects finite
/// evidence for the asymptotic ones.
pub fn check_t2(sched: &ParamSchedule) -> ClassReport {
    let heights = sched.heights();
    let four = BigInt::from(4);
    let mut entries = Vec::new();
    let mut push = |condition, stage, ok: Option<bool>, witness: String| {
        let outcome = match ok {
            Some(true) => Outcome::Pass,
            Some(false) => Outcome::Fail,
            None => Outcome::NotApplicable,
        };
        entries.push(ConditionEntry { condition, stage, outcome, witness });
    };

    for (k, st) in sched.stages.iter().enumerate() {
        let j = k + 1;
        let r = st.r;
        let h = &heights[k];
        if j == 1 {
            push(Condition::FirstColumnsAboveFour, j, Some(r > 4), format!("r₁={r}"));
        } else {
            let prev = sched.stages[k - 1].r;
            push(Condition::ColumnsNondecreasing, j, Some(prev <= r), format!("r{}={prev}, r{j}={r}", j - 1));
        }

        let gap = st.gap();
        push(Condition::GapAtMostColumns, j, Some(*gap <= BigInt::from(r)), format!("n={gap}, r={r}"));

        let s1 = st.spacer(1);
        push(Condition::FirstSpacer, j, Some(*s1 >= &four * h), format!("s(1)={s1}, 4h={}", &four * h));

        if r >= 5 {
            let bad: Vec<usize> = (2..=r - 3).filter(|&i| *st.spacer(i) < &four * st.spacer(i - 1)).collect();
            let witness = if bad.is_empty() { format!("i=2..{}", r - 3) } else { format!("violated at i={bad:?}") };
            push(Condition::InteriorGrowth, j, Some(bad.is_empty()), witness);
        } else {
            push(Condition::InteriorGrowth, j, None, format!("empty range for r={r}"));
        }

        if r >= 3 {
            let v = st.spacer(r - 2);
            push(Condition::ZeroBeforeGap, j, Some(v.is_zero()), format!("s({})={v}", r - 2));
        } else {
            push(Condition::ZeroBeforeGap, j, None, format!("no index r-2 for r={r}"));
        }

        if r >= 4 {
            let last = st.spacer(r);
            let base = st.spacer(r - 3);
            push(
                Condition::LastSpacer,
                j,
                Some(*last >= &four * base),
                format!("s({r})={last}, 4s({})={}", r - 3, &four * base),
            );
        } else {
            push(Condition::LastSpacer, j, None, format!("no index r-3 for r={r}"));
        }
    }

    let r_values: BTreeSet<usize> = sched.stages.iter().map(|s| s.r).collect();
    let r1 = sched.stages[0].r;
    let rmax = *r_values.iter().next_back().unwrap();
    let r_missing: Vec<usize> = (r1..=rmax).filter(|r| !r_values.contains(r)).collect();
    let mut j_counts = BTreeMap::new();
    for st in &sched.stages {
        *j_counts.entry((st.r, st.gap().clone())).or_insert(0) += 1;
    }

    let notes = vec![
        format!(
            "not decidable on a finite prefix: rⱼ takes all values from r₁; observed r values {:?}, missing in [{r1}, {rmax}]: {:?}",
            r_values, r_missing
        ),
        format!(
            "not decidable on a finite prefix: limsup |J(r,n)|/r⁴ = ∞; observed counts {}",
            j_counts
                .iter()
                .map(|((r, n), c)| format!("J({r},{n})={c}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ];

    ClassReport { entries, r_values, r_missing, j_counts, notes }
}

/// Builds the schedule that meets every per-stage inequality with equality:
/// `s(1) = 4h`, `s(i) = 4s(i-1)` up to `i = r-3`, `s(r-2) = 0`,
/// `s(r-1) = n`, `s(r) = 4s(r-3)`.
pub fn generate_t2_min(h1: Int, pairs: &[(usize, Int)]) -> Result<ParamSchedule> {
    if pairs.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if h1 < BigInt::from(4) {
        return Err(Error::InitialHeight(h1));
    }
    let four = BigInt::from(4);
    let mut h = h1.clone();
    let mut stages = Vec::with_capacity(pairs.len());
    let mut prev_r = 0;
    for (r, n) in pairs {
        let r = *r;
        if r < 5 {
            return Err(Error::TooFewColumnsForClass { r, n: n.clone() });
        }
        if *n > BigInt::from(r) {
            return Err(Error::SpacerAboveColumns { r, n: n.clone() });
        }
        if n.is_negative() {
            return Err(Error::NegativeSpacer { location: format!("pair (r={r})"), value: n.clone() });
        }
        if r < prev_r {
            return Err(Error::DecreasingColumns { prev: prev_r, next: r });
        }
        prev_r = r;
        let mut s = vec![BigInt::zero(); r];
        s[0] = &four * &h;
        for i in 1..r - 3 {
            s[i] = &four * &s[i - 1];
        }
        s[r - 3] = BigInt::zero();
        s[r - 2] = n.clone();
        s[r - 1] = &four * &s[r - 4];
        let st = StageParams { r, s };
        h = &h * BigInt::from(r) + st.spacer_total();
        stages.push(st);
    }
    ParamSchedule::new(h1, stages)
}
