use num_complex::Complex64;

/// Failure modes of the numerical core.
///
/// Every message starts with the name of the module that raised it so the
/// command-line front end can report where a run broke down.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("specfun: order {order} exceeds the configured limit {limit}")]
    OrderOverflow { order: usize, limit: usize },

    #[error("media: invalid profile parameters: {reason}")]
    InvalidParams { reason: &'static str },

    #[error("media: adaptive quadrature did not reach tolerance (estimate {estimate:e}, intervals {intervals})")]
    QuadratureFailure { estimate: f64, intervals: usize },

    #[error("radial: wavenumber must be nonzero")]
    InvalidK,

    #[error("radial: step size underflow at x = {at}")]
    StiffnessFailure { at: f64 },

    #[error("{module}: invalid argument: {reason}")]
    InvalidArgument { module: &'static str, reason: &'static str },

    #[error("detroot: zero on the contour could not be avoided after {attempts} box shifts")]
    BoundaryZero { attempts: usize },

    #[error("detroot: phase tracking bottomed out near k = {at}")]
    PhaseJump { at: Complex64 },

    #[error("detroot: sub-box around {center} still unresolved at depth {depth}")]
    NonConvergence { center: Complex64, depth: usize },

    #[error("detroot: density fit needs at least 3 radii, got {got}")]
    InsufficientData { got: usize },

    #[error("detroot: non-finite value while sampling at k = {at}")]
    Overflow { at: Complex64 },

    #[error("scatter: matching system singular at l = {l}, k = {k}")]
    MatchSingular { l: usize, k: f64 },

    #[error("asymlab: regression failed: {reason}")]
    FitFailure { reason: &'static str },

    #[error("asymlab: sample k = {k} lies within 1e-8 of a pole of the quotient")]
    PoleOnGrid { k: f64 },

    #[error("asymlab: residue contour around gamma_{j} meets a neighbouring pole")]
    ContourTooClose { j: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
