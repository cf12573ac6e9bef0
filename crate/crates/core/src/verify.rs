//! Exact checkers for the averaging identities, the Sidon column property and
//! the mixing bound.
//!
//! Checkers report residuals and counts; they never assume the identities
//! they check. Correlations that cannot be resolved within the built stages
//! surface as [`Error::Unresolved`].

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::correlation::{correlate, inner, CorrelationResult, ShiftedCombo};
use crate::exec::Exec;
use crate::levelset::{LevelSet, DEFAULT_CAP};
use crate::params::j_set;
use crate::tensor::{build_f, build_p_applied, norm_sq, FForm};
use crate::tower::StageTable;
use crate::{Error, Int, Rational, Result};

/// Largest window an exhaustive Sidon scan will walk.
pub const SCAN_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: u8,
    pub instance: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub residual: Rational,
}

impl LemmaReport {
    fn new(lemma: u8, instance: String, lhs: Rational, rhs: Rational) -> Self {
        let residual = &lhs - &rhs;
        Self { lemma, instance, lhs, rhs, residual }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

fn exact(c: CorrelationResult, what: impl FnOnce() -> String) -> Result<Rational> {
    if c.is_exact() {
        Ok(c.lo)
    } else {
        Err(Error::Unresolved(what()))
    }
}

/// The default test set: floor 0 of tower 1.
pub fn default_floor(table: &StageTable) -> LevelSet {
    LevelSet::floor(table, 1, 0).expect("tower 1 has a bottom floor")
}

/// `(T^{h_j}A, T^{-m}A)` against `r_j⁻¹ (A + T^{-s_j(r_j-1)}A, T^{-m}A)` for `m ∈ {0, n}`.
pub fn lemma1_check(table: &StageTable, a: &LevelSet, j: usize, m: &Int) -> Result<LemmaReport> {
    let st = table.stage_params(j)?;
    let n = st.gap().clone();
    if !m.is_zero() && *m != n {
        return Err(Error::LemmaShift { m: m.clone(), n });
    }
    let f = ShiftedCombo::indicator(a.clone());
    let probe = f.shifted(&-m);
    let instance = format!("j={j}, r={}, n={n}, m={m}", st.r());
    let lhs = exact(inner(table, &f.shifted(table.height(j)), &probe)?, || format!("lemma 1 lhs ({instance})"))?;
    let rhs = exact(inner(table, &ShiftedCombo::with_back_shift(a.clone(), &n), &probe)?, || {
        format!("lemma 1 rhs ({instance})")
    })? / Rational::from_integer(BigInt::from(st.r()));
    Ok(LemmaReport::new(1, instance, lhs, rhs))
}

/// `(T^{h_j}A, T^{h_i}A)` against `r⁻² ((I+T⁻ⁿ)A, (I+T⁻ⁿ)A)` for distinct `i, j ∈ J(r, n)`.
pub fn lemma2_check(table: &StageTable, a: &LevelSet, r: usize, n: &Int, i: usize, j: usize) -> Result<LemmaReport> {
    if i == j {
        return Err(Error::DistinctRequired(i));
    }
    let js = j_set(table.schedule(), r, n);
    for k in [i, j] {
        if !js.contains(&k) {
            return Err(Error::NotInJSet { stage: k, r, n: n.clone() });
        }
    }
    let f = ShiftedCombo::indicator(a.clone());
    let instance = format!("r={r}, n={n}, i={i}, j={j}");
    let lhs = exact(inner(table, &f.shifted(table.height(j)), &f.shifted(table.height(i)))?, || {
        format!("lemma 2 lhs ({instance})")
    })?;
    let g = ShiftedCombo::with_back_shift(a.clone(), n);
    let rhs = exact(inner(table, &g, &g)?, || format!("lemma 2 rhs ({instance})"))?
        / Rational::from_integer(BigInt::from(r * r));
    Ok(LemmaReport::new(2, instance, lhs, rhs))
}

/// `‖|J|⁻¹ Σ T^{h_j}A⊗T^{h_j}A − r⁻² (I+T⁻ⁿ)A⊗(I+T⁻ⁿ)A‖²` against
/// `|J|⁻¹ ((A,A)² − r⁻⁴ (A+T⁻ⁿA, A+T⁻ⁿA)²)`.
pub fn lemma3_check(table: &StageTable, a: &LevelSet, r: usize, n: &Int, exec: Exec) -> Result<LemmaReport> {
    let p = build_p_applied(table, r, n, a)?;
    let count = j_set(table.schedule(), r, n).len();
    let instance = format!("r={r}, n={n}, |J|={count}");
    let r2 = Rational::from_integer(BigInt::from(r * r));
    let diff = p.minus(&build_f(a, n, FForm::BackShiftSquare).scaled(&(Rational::one() / &r2)));
    let lhs = exact(norm_sq(table, &diff, exec)?, || format!("lemma 3 lhs ({instance})"))?;

    let f = ShiftedCombo::indicator(a.clone());
    let aa = exact(inner(table, &f, &f)?, || format!("lemma 3 (A,A) ({instance})"))?;
    let g = ShiftedCombo::with_back_shift(a.clone(), n);
    let gg = exact(inner(table, &g, &g)?, || format!("lemma 3 overlap ({instance})"))?;
    let rhs = (&aa * &aa - &gg * &gg / (&r2 * &r2)) / Rational::from_integer(BigInt::from(count));
    Ok(LemmaReport::new(3, instance, lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidonReport {
    pub stage: usize,
    pub m: Int,
    /// Columns `i` with `μ(X_j ∩ TᵐX_j ∩ X_{i,j}) > 0`, ascending.
    pub touched: Vec<usize>,
    pub k: usize,
}

impl SidonReport {
    pub fn count(&self) -> usize {
        self.touched.len()
    }

    pub fn pass(&self) -> bool {
        self.count() <= self.k
    }
}

/// Which intersections a Sidon count looks at.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SidonScope {
    /// The whole of `X_j ∩ TᵐX_j`, followed through every built stage.
    #[default]
    Full,
    /// Only the part of `X_j ∩ TᵐX_j` realized inside tower `j + 1`, i.e.
    /// pairs of columns of tower `j` placed by the offsets of stage `j`.
    NextTower,
}

/// Columns of tower `j` met by `X_j ∩ TᵐX_j`, for `h_j < m ≤ h_{j+1}`.
pub fn sidon_count(table: &StageTable, j: usize, m: &Int, k: usize) -> Result<SidonReport> {
    sidon_count_scoped(table, j, m, k, SidonScope::Full)
}

pub fn sidon_count_scoped(table: &StageTable, j: usize, m: &Int, k: usize, scope: SidonScope) -> Result<SidonReport> {
    let r = table.offsets(j)?.len();
    let (lo, hi) = (table.height(j), table.height(j + 1));
    if m <= lo || m > hi {
        return Err(Error::WindowOutOfRange { stage: j, m: m.clone(), lo: lo.clone(), hi: hi.clone() });
    }
    let tower = LevelSet::tower(table, j)?;
    let mut touched = Vec::new();
    match scope {
        SidonScope::Full => {
            for i in 1..=r {
                let column = LevelSet::column(table, j, i)?;
                let c = correlate(table, &column, &tower, m)?;
                if c.lo > Rational::zero() {
                    touched.push(i);
                } else if !c.is_exact() {
                    return Err(Error::Unresolved(format!("sidon stage {j}, m={m}, column {i}")));
                }
            }
        }
        SidonScope::NextTower => {
            let levels = tower.flatten(table, j + 1, DEFAULT_CAP)?;
            for i in 1..=r {
                let column = LevelSet::column(table, j, i)?;
                if !column.base().overlap_with_shift(&levels, m).is_zero() {
                    touched.push(i);
                }
            }
        }
    }
    Ok(SidonReport { stage: j, m: m.clone(), touched, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sample { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidonSummary {
    pub stage: usize,
    pub k: usize,
    pub scanned: usize,
    pub max_count: usize,
    /// Smallest shift attaining `max_count`.
    pub worst_m: Option<Int>,
    pub violations: Vec<SidonReport>,
    pub unresolved: Vec<Int>,
}

impl SidonSummary {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The shifts a scan of stage `j` visits, ascending.
pub fn scan_shifts(table: &StageTable, j: usize, mode: ScanMode) -> Result<Vec<Int>> {
    table.offsets(j)?;
    let lo = table.height(j) + BigInt::one();
    let hi = table.height(j + 1).clone();
    match mode {
        ScanMode::Exhaustive => {
            let size = &hi - &lo + BigInt::one();
            match size.to_u64() {
                Some(s) if s <= SCAN_CAP => {}
                _ => return Err(Error::ScanTooLarge { size, cap: SCAN_CAP }),
            }
            let mut out = Vec::new();
            let mut m = lo;
            while m <= hi {
                out.push(m.clone());
                m += 1;
            }
            Ok(out)
        }
        ScanMode::Sample { n, seed } => Ok(sample_shifts(&lo, &hi, n, seed)),
    }
}

/// `n` uniform draws from `[lo, hi]` under a seeded ChaCha8 stream, sorted
/// and deduplicated. Empty when `lo > hi`.
pub fn sample_shifts(lo: &Int, hi: &Int, n: usize, seed: u64) -> Vec<Int> {
    if lo > hi {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let end = hi + BigInt::one();
    let mut out: Vec<Int> = (0..n).map(|_| rng.gen_bigint_range(lo, &end)).collect();
    out.sort();
    out.dedup();
    out
}

pub fn sidon_scan(
    table: &StageTable,
    j: usize,
    k: usize,
    mode: ScanMode,
    scope: SidonScope,
    exec: Exec,
) -> Result<SidonSummary> {
    let shifts = scan_shifts(table, j, mode)?;
    sidon_scan_shifts(table, j, k, &shifts, scope, exec)
}

pub fn sidon_scan_shifts(
    table: &StageTable,
    j: usize,
    k: usize,
    shifts: &[Int],
    scope: SidonScope,
    exec: Exec,
) -> Result<SidonSummary> {
    let results = exec.map(shifts, |m| sidon_count_scoped(table, j, m, k, scope));
    let mut summary = SidonSummary {
        stage: j,
        k,
        scanned: shifts.len(),
        max_count: 0,
        worst_m: None,
        violations: vec![],
        unresolved: vec![],
    };
    for (m, res) in shifts.iter().zip(results) {
        match res {
            Ok(rep) => {
                if summary.worst_m.is_none() || rep.count() > summary.max_count {
                    summary.max_count = rep.count();
                    summary.worst_m = Some(m.clone());
                }
                if !rep.pass() {
                    summary.violations.push(rep);
                }
            }
            Err(Error::Unresolved(_)) => summary.unresolved.push(m.clone()),
            Err(e) => return Err(e),
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MixingStatus {
    /// Exact value within the bound of every window containing `m`.
    Within,
    Violation,
    /// `m` lies in no window `[h_j, h_{j+1}]` with `j` at or above the home stage of `A`.
    NotApplicable,
    Unresolved,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixingRow {
    pub m: Int,
    pub value: Option<CorrelationResult>,
    /// Stages `j` with `h_j ≤ m ≤ h_{j+1}` and `j ≥ home(A)`.
    pub windows: Vec<usize>,
    /// `k μ(A) / r_j`, minimized over `windows`.
    pub bound: Option<Rational>,
    pub status: MixingStatus,
}

/// `μ(A ∩ TᵐB)` for every shift, each checked against `k μ(A) / r_j` on its
/// stage window.
pub fn mixing_profile(
    table: &StageTable,
    a: &LevelSet,
    b: &LevelSet,
    shifts: &[Int],
    k: usize,
    exec: Exec,
) -> Vec<MixingRow> {
    let mu = a.measure(table);
    let kk = Rational::from_integer(BigInt::from(k));
    exec.map(shifts, |m| {
        let windows: Vec<usize> = (a.home().max(1)..=table.last_parameterized())
            .filter(|&j| table.height(j) <= m && m <= table.height(j + 1))
            .collect();
        let bound = windows
            .iter()
            .map(|&j| &kk * &mu / Rational::from_integer(BigInt::from(table.offsets(j).unwrap().len())))
            .min();
        let value = correlate(table, a, b, m);
        let status = match (&value, &bound) {
            (Err(e), _) => MixingStatus::Failed(e.to_string()),
            (Ok(_), None) => MixingStatus::NotApplicable,
            (Ok(v), Some(bd)) => {
                if v.lo > *bd {
                    MixingStatus::Violation
                } else if !v.is_exact() {
                    MixingStatus::Unresolved
                } else {
                    MixingStatus::Within
                }
            }
        };
        MixingRow { m: m.clone(), value: value.ok(), windows, bound, status }
    })
}
