//! Crate-wide error type.

use alloc::string::String;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong across the simulation and certification
/// pipeline. Variants carry enough context to point at the offending input.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An angle argument fell outside its documented interval.
    #[error("{name} = {value} outside [{min}, {max}]")]
    AngleOutOfRange {
        /// Which angle was rejected.
        name: &'static str,
        /// The offending value, in radians.
        value: f64,
        /// Lower end of the accepted interval.
        min: f64,
        /// Upper end of the accepted interval.
        max: f64,
    },

    /// A state vector or Bloch direction failed its unit-norm invariant.
    #[error("{what} is not normalized: |norm^2 - 1| = {deviation:e}")]
    NotNormalized {
        /// What failed the check.
        what: &'static str,
        /// Distance of the squared norm from one.
        deviation: f64,
    },

    /// A measurement branch had vanishing probability; normalizing it would
    /// divide by (numerical) zero.
    #[error("degenerate measurement branch: norm^2 = {norm_sq:e} below threshold")]
    DegenerateBranch {
        /// Squared norm of the unnormalized branch.
        norm_sq: f64,
    },

    /// A Bell value exceeded the maximal quantum value by more than the
    /// roundoff tolerance, so no quantum strategy can produce it.
    #[error("Bell value {value} infeasible: exceeds quantum maximum {max}")]
    InfeasibleBellValue {
        /// The offending Bell value.
        value: f64,
        /// The maximal quantum value for the requested parameters.
        max: f64,
    },

    /// Bell-expression parameters violated α ≥ 1, β ≥ 0 or αβ < 2.
    #[error("invalid Bell parameters alpha = {alpha}, beta = {beta} (need alpha >= 1, beta >= 0, alpha*beta < 2)")]
    InvalidBellParams {
        /// Requested α.
        alpha: f64,
        /// Requested β.
        beta: f64,
    },

    /// A correlator set violated a range or positivity constraint.
    #[error("invalid correlators: {detail}")]
    InvalidCorrelators {
        /// Which constraint failed.
        detail: String,
    },

    /// A protocol or sampling configuration failed validation.
    #[error("invalid config field `{field}`: {detail}")]
    InvalidConfig {
        /// The offending field.
        field: &'static str,
        /// What was wrong with it.
        detail: String,
    },

    /// A branch angle decayed below the double-precision floor, so the
    /// sequence cannot be continued.
    #[error("branch angle underflowed to {theta:e}; sequence exhausted")]
    UnderflowExhausted {
        /// The (sub-normal or zero) branch angle.
        theta: f64,
    },

    /// An explicit branch tree was requested beyond the memory budget.
    #[error("branch tree with n = {n} exceeds the supported depth {max} (tree is exponential)")]
    TreeTooLarge {
        /// Requested sequence length.
        n: usize,
        /// Largest supported length for explicit trees.
        max: usize,
    },

    /// An optimizer was started with too small an evaluation budget.
    #[error("evaluation budget {budget} below minimum {min}")]
    BudgetTooSmall {
        /// Requested budget.
        budget: u64,
        /// Smallest accepted budget.
        min: u64,
    },
}
