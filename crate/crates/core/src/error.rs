use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coherent inputs have no Fock hierarchy; use the coherent solver")]
    CoherentInput,

    #[error("level {level} is numerically singular (condition estimate {condition:.3e})")]
    SingularLevel { level: usize, condition: f64 },

    #[error("integrator could not meet tolerance at t = {time}")]
    StepFailure { time: f64 },

    #[error("input flux is zero")]
    ZeroFlux,

    #[error("both transmittivities vanish; ratio metrics are undefined (r1 = {r1})")]
    BothBlocked { r1: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::CoherentInput | Error::Config(_)
        )
    }
}
