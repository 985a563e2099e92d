use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (non-finite input,
    /// non-positive exponent, inadmissible homogeneity parameter, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("not Hurwitz: {0}")]
    NotHurwitz(String),

    #[error("degenerate roots: {0}")]
    DegenerateRoots(String),

    /// The sampled level set contains a point where the closed loop does not
    /// decrease the Lyapunov function.
    #[error("closed loop not certified: {0}")]
    NotCertified(String),

    #[error("simulation diverged at t = {time} (step {step})")]
    Diverged { time: f64, step: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}
