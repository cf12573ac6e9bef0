//! Exact-arithmetic toolkit for rank-one cutting-and-stacking constructions.
//!
//! A construction is fixed by an initial tower height `h1` and, for every
//! stage, a column count `r` and a spacer vector `s`. From those parameters
//! this crate builds the tower geometry ([`tower`]), represents finite-measure
//! unions of floors ([`levelset`]), evaluates correlations `μ(A ∩ TᵐB)`
//! exactly ([`correlation`]), manipulates formal vectors of the symmetric
//! tensor square ([`tensor`]) and checks the Sidon, mixing and averaging
//! identities of the Sidon-type class of constructions ([`verify`]).
//!
//! Every quantity is an arbitrary-precision integer or rational. No floating
//! point appears on any computation path.

pub mod address;
pub mod correlation;
mod error;
pub mod exec;
pub mod intervals;
pub mod levelset;
pub mod params;
pub mod rational;
pub mod tensor;
pub mod tower;
pub mod verify;

pub use correlation::{correlate, inner, oracle_correlate, CorrelationResult, ShiftedCombo};
pub use error::{Error, Result};
pub use exec::Exec;
pub use levelset::LevelSet;
pub use params::{ClassReport, ParamSchedule, StageParams};
pub use tensor::TensorVec;
pub use tower::StageTable;

/// Arbitrary-precision integer used for heights, levels, offsets and spacers.
pub type Int = num_bigint::BigInt;
/// Exact rational used for measures and inner products.
pub type Rational = num_rational::BigRational;
