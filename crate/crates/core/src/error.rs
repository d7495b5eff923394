use thiserror::Error;

/// Errors raised by the positivity, measure, shift, and triplet layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Hankel section was requested past the end of the sequence.
    #[error("hankel section out of range: offset {offset} + 2*({size} - 1) exceeds order {order}")]
    IndexOverflow {
        offset: usize,
        size: usize,
        order: usize,
    },

    /// The sequence is too short for the requested operation.
    #[error("sequence order {order} is too small, need at least {required}")]
    OrderTooSmall { order: usize, required: usize },

    /// A sequence entry or derived quantity is NaN or infinite.
    #[error("sequence entries must be finite")]
    NonFiniteEntry,

    /// Moment sequences must have at least one entry.
    #[error("moment sequence must not be empty")]
    EmptySequence,

    /// The integrand is not finite at a node of the measure.
    #[error("integrand is not finite at node {node}")]
    NonFiniteIntegrand { node: f64 },

    /// Two stored nodes both match the queried point.
    #[error("two atoms lie within the matching radius of {x0}")]
    AmbiguousAtom { x0: f64 },

    /// Atom list violates the measure invariants.
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// The sequence fails the Stieltjes test, so no representing measure exists.
    #[error("not a Stieltjes moment sequence (refuted at hankel offset {offset})")]
    NotAMeasure { offset: usize },

    /// Quadrature recovery produced atoms that do not reproduce the moments.
    #[error("moment recovery unstable: relative residual {residual:.3e} exceeds tolerance")]
    RankDeficiencyUnstable { residual: f64 },

    /// Tolerance thresholds must lie strictly inside (0, 1).
    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    /// Weight specification violates the shift invariants.
    #[error("invalid shift specification: {0}")]
    InvalidShift(String),

    /// Triplet recovery requires the orbit sequence to be CPD.
    #[error("orbit sequence is not CPD")]
    NotCpd,

    /// Triplet recovery requires a unit-vector orbit (gamma_0 = 1).
    #[error("orbit sequence is not normalized: gamma_0 = {gamma0}")]
    NotNormalized { gamma0: f64 },

    /// Triplet fields violate the representing-triplet invariants.
    #[error("invalid triplet: {0}")]
    InvalidTriplet(String),

    /// The subnormality certificate is a precondition of the operation.
    #[error("subnormality certificate failed at condition ({condition})")]
    CertificateFailed { condition: char },

    /// Example-family constructor constraints were not met.
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    /// Class inclusions failed across verdicts; signals a tolerance bug.
    #[error("class hierarchy violated: {0}")]
    HierarchyViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
