use thiserror::Error;

use crate::Int;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed parameter document at {location}: {message}")]
    Document { location: String, message: String },

    #[error("{location}: spacer list length {len} ≠ r={r}")]
    SpacerLength { location: String, len: usize, r: usize },

    #[error("{location}: negative spacer {value}")]
    NegativeSpacer { location: String, value: Int },

    #[error("{location}: r={r} but at least 2 columns are required")]
    TooFewColumns { location: String, r: usize },

    #[error("h1 < 4 (got {0})")]
    InitialHeight(Int),

    #[error("schedule has no stages")]
    EmptySchedule,

    #[error("pair (r={r}, n={n}): n > r would make J(r,n) non-empty for r < n")]
    SpacerAboveColumns { r: usize, n: Int },

    #[error("pair (r={r}, n={n}): r < 5 (the first column count must exceed 4)")]
    TooFewColumnsForClass { r: usize, n: Int },

    #[error("column counts must be nondecreasing: r={prev} followed by r={next}")]
    DecreasingColumns { prev: usize, next: usize },

    #[error("stage {stage} is not built (last built stage is {last})")]
    StageOutOfRange { stage: usize, last: usize },

    #[error("stage {stage} has no column structure (last parameterized stage is {last})")]
    NoColumns { stage: usize, last: usize },

    #[error("interval [{lo}, {hi}] is outside [0, {height}) of tower {stage}")]
    IntervalOutOfRange { stage: usize, lo: Int, hi: Int, height: Int },

    #[error("column {column} out of range 1..={r} at stage {stage}")]
    ColumnOutOfRange { stage: usize, column: usize, r: usize },

    #[error("refinement to stage {stage} needs {atoms} atoms, cap is {cap}")]
    CapExceeded { stage: usize, atoms: u128, cap: u128 },

    #[error("no built stage has height > {m} (tallest tower has height {tallest})")]
    NoStageAbove { m: Int, tallest: Int },

    #[error("stage {stage} too shallow for shift {m}: some level leaves tower of height {height}")]
    ShallowStage { stage: usize, m: Int, height: Int },

    #[error("target stage {target} is below home stage {home}")]
    RefineBelowHome { target: usize, home: usize },

    #[error("J(r={r}, n={n}) is empty in this schedule")]
    EmptyJSet { r: usize, n: Int },

    #[error("stage {stage} is not in J(r={r}, n={n})")]
    NotInJSet { stage: usize, r: usize, n: Int },

    #[error("shift m={m} must be 0 or n={n}")]
    LemmaShift { m: Int, n: Int },

    #[error("distinct indices required (got {0} twice)")]
    DistinctRequired(usize),

    #[error("unresolved correlation mass in {0}; build more stages")]
    Unresolved(String),

    #[error("shift m={m} outside the window ({lo}, {hi}] of stage {stage}")]
    WindowOutOfRange { stage: usize, m: Int, lo: Int, hi: Int },

    #[error("exhaustive scan of {size} shifts exceeds the scan cap {cap}; use sampling")]
    ScanTooLarge { size: Int, cap: u64 },

    #[error("bad set address {input:?}: {message}")]
    Address { input: String, message: String },
}
