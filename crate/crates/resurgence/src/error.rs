use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A query point (plus its safety margin) falls outside the enumerated
    /// window of the singularity set.
    #[error("point with |xi| = {modulus} exceeds the safe query radius {safe_radius} of the enumerated singularity set")]
    RadiusExceeded { modulus: f64, safe_radius: f64 },

    #[error("invalid parameters: {0}")]
    DomainError(String),

    /// The path passes within tolerance of a singular point, so winding
    /// numbers (and hence sheet identification) are not decidable.
    #[error("path passes within {distance} of singular point {omega:?}; sheet test undecidable")]
    UndecidableNearOmega { omega: (f64, f64), distance: f64 },

    #[error("path is invalid: {0}")]
    InvalidPath(String),

    #[error("evaluation point with |zeta| = {modulus} lies outside the validity disc of radius {radius}")]
    OutOfDisc { modulus: f64, radius: f64 },

    #[error("path passes within {distance} of a singular point at {omega:?}")]
    SingularityOnPath { omega: (f64, f64), distance: f64 },

    #[error("disc-chaining radius collapsed below {radius} at center {center:?}")]
    DiscChainUnderflow { center: (f64, f64), radius: f64 },

    #[error("segment [0, zeta] meets the singularity set at {omega:?}")]
    PathBlocked { omega: (f64, f64) },

    #[error("requested tolerance {requested} not met; achieved error estimate {achieved}")]
    ToleranceNotMet { requested: f64, achieved: f64 },

    /// The flow denominator dropped below the admissibility level, which the
    /// theory forbids; the input path or step control is bad.
    #[error("flow denominator D = {measured} dropped below delta = {delta} at t = {t}")]
    DeltaViolated { measured: f64, delta: f64, t: f64 },

    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("argument series has a nonzero constant term; substitution is not formally convergent")]
    ConstantTermPresent,

    #[error("family stored up to total degree {k_max} but order {needed} is required")]
    InsufficientFamilyDepth { k_max: usize, needed: usize },

    #[error("linear part of the implicit equation is degenerate (d/dy at the origin vanishes)")]
    DegenerateLinearPart,

    #[error("implicit solution residual check failed at order {order}")]
    ResidualCheckFailed { order: usize },

    #[error("coefficient of order {requested} requested but series is only valid through order {order}")]
    OrderExceeded { requested: usize, order: usize },

    #[error("direction theta = {theta} with z = {z:?} is outside the admissible half-plane (Re(z e^(i theta)) = {real_part} <= tau = {tau})")]
    OutsideHalfPlane {
        theta: f64,
        z: (f64, f64),
        real_part: f64,
        tau: f64,
    },

    #[error("no exponential-type certificate available for the tail bound")]
    TailBoundUnavailable,

    #[error("direction interval is invalid: {0}")]
    BadDirectionInterval(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainError(msg.into())
    }
}
