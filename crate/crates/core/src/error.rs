//! Error type shared by all modules.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong, from matrix assembly to enclosure logic.
///
/// The variants fall into three groups: input/shape problems
/// ([`Error::DimensionCap`], [`Error::BadInput`]), numerical failures
/// ([`Error::NotPositiveDefinite`], [`Error::SingularShift`],
/// [`Error::IterationCapExceeded`], [`Error::NoMinimumFound`],
/// [`Error::NoRootInGap`]), and violated method hypotheses
/// ([`Error::BracketInvalid`], [`Error::HypothesisHViolated`],
/// [`Error::ConditionAViolated`], [`Error::MuOutsideBrackets`]).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Matrix dimension exceeds the supported desk-scale cap.
    #[error("dimension {dim} exceeds the supported cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// Malformed input that no numerical method can repair.
    #[error("invalid input: {0}")]
    BadInput(String),

    /// Cholesky factorization hit a non-positive pivot.
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// A shifted linear solve met an exactly singular matrix even after
    /// perturbing the shift.
    #[error("shifted solve is singular at shift {shift:.17e}")]
    SingularShift { shift: f64 },

    /// An iterative solver exhausted its iteration budget.
    #[error("{what} did not converge within {cap} iterations")]
    IterationCapExceeded { what: &'static str, cap: usize },

    /// A root bracket does not have the sign change the method requires.
    /// Usually means a candidate minimum is spurious or the interlacing
    /// hypothesis fails.
    #[error("invalid bracket for {what}: no sign change on [{lo:.17e}, {hi:.17e}]")]
    BracketInvalid { what: &'static str, lo: f64, hi: f64 },

    /// Computed bounds crossed (lower ≥ upper): the assumed interlacing of
    /// one eigenvalue per candidate interval cannot hold.
    #[error("interlacing hypothesis refuted at interval {index}: lower {lower:.17e} ≥ upper {upper:.17e}")]
    HypothesisHViolated { index: usize, lower: f64, upper: f64 },

    /// The Lehmann method's spectral condition fails: no Rayleigh quotient of
    /// the truncation lies beyond the chosen gap parameters.
    #[error("Lehmann condition violated: truncation spectrum does not straddle (nu, mu) = ({nu:.17e}, {mu:.17e})")]
    ConditionAViolated { nu: f64, mu: f64 },

    /// No interior local minimum was detected on the scan grid.
    #[error("no interior local minimum found on the scanned interval")]
    NoMinimumFound,

    /// The secular function does not change sign over the requested gap.
    #[error("secular equation has no root in the gap [{lo:.17e}, {hi:.17e}]")]
    NoRootInGap { lo: f64, hi: f64 },

    /// The pollution target does not lie strictly between its bracket pair.
    #[error("target {mu:.17e} is outside the bracket ({lo:.17e}, {hi:.17e}) at position {index}")]
    MuOutsideBrackets { index: usize, mu: f64, lo: f64, hi: f64 },

    /// A Ritz-vector index is out of range.
    #[error("Ritz index {index} out of range for dimension {len}")]
    RitzIndexOutOfRange { index: usize, len: usize },
}
