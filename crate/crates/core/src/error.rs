use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The eliminated dipole response has a pole on the real frequency axis.
    #[error("singular dipole self-energy (gamma = 0 and detuning {delta} equals probe detuning)")]
    SingularSelfEnergy { delta: f64 },

    #[error("dynamical matrix is numerically singular (condition estimate {condition:e})")]
    NumericallySingular { condition: f64 },

    #[error("flux balance violated: residual {residual:e}")]
    FluxViolation { residual: f64 },

    #[error("time-domain oracle did not converge: {0}")]
    OracleDiverged(String),

    #[error("single-site response has a zero denominator")]
    SingularResponse,

    #[error("Purcell factor is unbounded (gamma = 0)")]
    InfinitePurcell,

    #[error("matching condition undefined: t_mm(s2 -> d1) vanishes")]
    MatchingUndefined,

    #[error("detector efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),

    #[error("no detection probability at drain 1 (efficiency {eta:e})")]
    NoDetectionProbability { eta: f64 },

    #[error("invalid two-qubit state: {0}")]
    InvalidState(String),

    #[error("invalid initialisation amplitudes: {0}")]
    InvalidInit(String),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid material parameters: {0}")]
    InvalidMaterial(String),
}
