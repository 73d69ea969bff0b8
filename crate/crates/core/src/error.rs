use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level r = {0} must be an odd integer >= 3")]
    InvalidLevel(i64),

    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    #[error("{0:?} is not r-admissible at r = {1}")]
    NotAdmissible(Vec<u32>, u32),

    #[error("loss of significance: |sum| / max|term| = {relative:e}")]
    LossOfSignificance { relative: f64 },

    #[error("imaginary residue {relative:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { relative: f64, tolerance: f64 },

    #[error("argument {0} lies outside the admissible bracket [{1}, {2}]")]
    OutsideBracket(f64, f64, f64),

    #[error("empty bracket: max U = {lo} > upper end {hi}")]
    EmptyBracket { lo: f64, hi: f64 },

    #[error("dilogarithm argument {0} lies on the branch cut [1, inf)")]
    BranchCut(f64),

    #[error("invalid input document: {0}")]
    InvalidDocument(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("r = {r} exceeds the scan ceiling {ceiling}; pass an override to force")]
    ScanCeiling { r: u32, ceiling: u32 },

    #[error("{0}")]
    InvalidArgument(String),
}
