use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("missing configuration field `{0}`")]
    MissingField(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("well width must be positive, got {0} nm")]
    NonPositiveWidth(f64),
    #[error("electron energy {energy} meV does not exceed the gate potential {gate} meV")]
    EnergyBelowGate { energy: f64, gate: f64 },
    #[error("k_x = {0} nm^-1 lies outside the guided window (negative decay constant)")]
    OutOfDomain(f64),
    #[error("no guided modes in the well")]
    NoModesFound,
    #[error("mode {index} requested but the {well} well supports only {available}")]
    ModeNotFound {
        well: &'static str,
        index: usize,
        available: usize,
    },
    #[error("step {dy} nm too large for coupling scale {scale} nm^-1")]
    StepTooLarge { dy: f64, scale: f64 },
    #[error("coupling is not Hermitian (C12 = {c12}, C21 = {c21})")]
    NonHermitian { c12: f64, c21: f64 },
    #[error("zero coupling: no transfer length exists")]
    ZeroCoupling,
    #[error("need at least 3 points for a fit, got {0}")]
    InsufficientPoints(usize),
    #[error("transition frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("unknown propagator `{0}`")]
    UnknownPropagator(String),
}

impl Error {
    /// Failures caused by the device physics (as opposed to bad input).
    pub fn is_physics(&self) -> bool {
        matches!(
            self,
            Error::NoModesFound
                | Error::ModeNotFound { .. }
                | Error::ZeroCoupling
                | Error::NonHermitian { .. }
                | Error::OutOfDomain(_)
        )
    }
}
