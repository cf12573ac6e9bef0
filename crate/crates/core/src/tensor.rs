//! Formal vectors of `L²(μ) ⊗ L²(μ)` built from shifted indicators, with
//! Gram-expansion norms.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::correlation::{inner, CorrelationResult, ShiftedCombo};
use crate::exec::Exec;
use crate::levelset::LevelSet;
use crate::params::j_set;
use crate::tower::StageTable;
use crate::{Error, Int, Rational, Result};

/// `Σ c · (left ⊗ right)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TensorVec {
    terms: Vec<(Rational, ShiftedCombo, ShiftedCombo)>,
}

/// Elementary tensor of two shifted indicators: `(coef, (k, S), (l, R))`
/// stands for `coef · 1_{TᵏS} ⊗ 1_{TˡR}`.
pub type ElementaryTerm = (Rational, (Int, LevelSet), (Int, LevelSet));

impl TensorVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn elementary(coef: Rational, left: ShiftedCombo, right: ShiftedCombo) -> Self {
        Self { terms: vec![(coef, left, right)] }
    }

    pub fn terms(&self) -> &[(Rational, ShiftedCombo, ShiftedCombo)] {
        &self.terms
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self { terms: self.terms.iter().map(|(k, l, r)| (k * c, l.clone(), r.clone())).collect() }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&-Rational::one()))
    }

    /// Fully expanded form with like terms merged and zero terms dropped,
    /// in first-occurrence order.
    pub fn expand(&self) -> Vec<ElementaryTerm> {
        let mut out: Vec<ElementaryTerm> = Vec::new();
        for (c, l, r) in &self.terms {
            for lt in l.terms() {
                for rt in r.terms() {
                    let coef = c * &lt.coef * &rt.coef;
                    let left = (lt.shift.clone(), lt.set.clone());
                    let right = (rt.shift.clone(), rt.set.clone());
                    match out.iter_mut().find(|(_, x, y)| *x == left && *y == right) {
                        Some(entry) => entry.0 += coef,
                        None => out.push((coef, left, right)),
                    }
                }
            }
        }
        out.retain(|(c, _, _)| !c.is_zero());
        out
    }
}

/// `⟨u, v⟩ = Σ c c' ⟨l, l'⟩ ⟨r, r'⟩`.
pub fn tensor_inner(table: &StageTable, u: &TensorVec, v: &TensorVec, exec: Exec) -> Result<CorrelationResult> {
    let grid: Vec<_> = u.terms.iter().flat_map(|p| v.terms.iter().map(move |q| (p, q))).collect();
    let parts = exec.map(&grid, |((c, l, r), (c2, l2, r2))| -> Result<CorrelationResult> {
        let coef = c * c2;
        if coef.is_zero() {
            return Ok(CorrelationResult::zero());
        }
        let left = inner(table, l, l2)?;
        let right = inner(table, r, r2)?;
        Ok(left.mul(&right).scale(&coef))
    });
    parts.into_iter().try_fold(CorrelationResult::zero(), |acc, p| Ok(acc.add(&p?)))
}

pub fn norm_sq(table: &StageTable, u: &TensorVec, exec: Exec) -> Result<CorrelationResult> {
    let mut n = tensor_inner(table, u, u, exec)?;
    // A squared norm is never negative, whatever the unresolved slack says.
    if n.lo < Rational::zero() {
        n = CorrelationResult { unresolved: n.hi().max(Rational::zero()), lo: Rational::zero() };
    }
    Ok(n)
}

/// Which of the two vectors `F_n` to build from `f = 1_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FForm {
    /// `Tⁿf ⊗ f + f ⊗ Tⁿf`.
    SymmetricShift,
    /// `(I + T⁻ⁿ)f ⊗ (I + T⁻ⁿ)f`, the form used by [`approx_error`].
    BackShiftSquare,
}

pub fn build_f(a: &LevelSet, n: &Int, form: FForm) -> TensorVec {
    let one = Rational::one();
    match form {
        FForm::SymmetricShift => {
            let f = ShiftedCombo::indicator(a.clone());
            let tf = f.shifted(n);
            TensorVec::elementary(one.clone(), tf.clone(), f.clone()).plus(&TensorVec::elementary(one, f, tf))
        }
        FForm::BackShiftSquare => {
            let g = ShiftedCombo::with_back_shift(a.clone(), n);
            TensorVec::elementary(one, g.clone(), g)
        }
    }
}

/// `P_{r,n}(1_A ⊗ 1_A) = |J|⁻¹ Σ_{j ∈ J(r,n)} T^{h_j}1_A ⊗ T^{h_j}1_A`.
pub fn build_p_applied(table: &StageTable, r: usize, n: &Int, a: &LevelSet) -> Result<TensorVec> {
    let js = j_set(table.schedule(), r, n);
    if js.is_empty() {
        return Err(Error::EmptyJSet { r, n: n.clone() });
    }
    let coef = Rational::new(BigInt::one(), BigInt::from(js.len()));
    let f = ShiftedCombo::indicator(a.clone());
    let terms = js
        .iter()
        .map(|&j| {
            let g = f.shifted(table.height(j));
            (coef.clone(), g.clone(), g)
        })
        .collect();
    Ok(TensorVec { terms })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxReport {
    pub r: usize,
    pub n: Int,
    pub j_count: usize,
    /// `‖r² P_{r,n}(1_A⊗1_A) − F_n‖²` by Gram expansion.
    pub error_sq: CorrelationResult,
    /// `r⁴ |J|⁻¹ ((A,A)² − r⁻⁴ (A+T⁻ⁿA, A+T⁻ⁿA)²)`.
    pub lemma3_rhs_scaled: CorrelationResult,
    /// `μ(A)² r⁴ / |J|`.
    pub bound: Rational,
    /// `None` when unresolved mass leaves the comparison undecided.
    pub within_bound: Option<bool>,
}

impl ApproxReport {
    pub fn is_exact(&self) -> bool {
        self.error_sq.is_exact() && self.lemma3_rhs_scaled.is_exact()
    }

    /// `error_sq − lemma3_rhs_scaled` when both are exact.
    pub fn residual(&self) -> Option<Rational> {
        Some(self.error_sq.value()? - self.lemma3_rhs_scaled.value()?)
    }
}

pub fn approx_error(table: &StageTable, a: &LevelSet, r: usize, n: &Int, exec: Exec) -> Result<ApproxReport> {
    let p = build_p_applied(table, r, n, a)?;
    let j_count = j_set(table.schedule(), r, n).len();
    let r2 = Rational::from_integer(BigInt::from(r * r));
    let r4 = &r2 * &r2;
    let f = build_f(a, n, FForm::BackShiftSquare);
    let diff = p.scaled(&r2).minus(&f);
    let error_sq = norm_sq(table, &diff, exec)?;

    let ia = ShiftedCombo::indicator(a.clone());
    let self_inner = inner(table, &ia, &ia)?;
    let g = ShiftedCombo::with_back_shift(a.clone(), n);
    let g_norm = inner(table, &g, &g)?;
    let jinv = Rational::new(BigInt::one(), BigInt::from(j_count));
    let rhs = self_inner.mul(&self_inner).add(&g_norm.mul(&g_norm).scale(&-(Rational::one() / &r4))).scale(&jinv);
    let lemma3_rhs_scaled = rhs.scale(&r4);

    let mu = a.measure(table);
    let bound = &mu * &mu * &r4 * &jinv;
    let within_bound = if error_sq.hi() <= bound {
        Some(true)
    } else if error_sq.lo > bound {
        Some(false)
    } else {
        None
    };
    Ok(ApproxReport { r, n: n.clone(), j_count, error_sq, lemma3_rhs_scaled, bound, within_bound })
}
