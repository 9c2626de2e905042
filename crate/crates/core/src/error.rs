use thiserror::Error;

/// Error taxonomy shared by every module in the crate.
///
/// The variants mirror the ways a computation can leave the admissible
/// region: bad arguments (`Domain`), states that violate the relativistic
/// constraints (`Admissibility`), quantities that are undefined at the given
/// input (`Degenerate`), linear algebra that cannot proceed (`Singular`),
/// time steps that exceed the stability bound (`Cfl`), conserved states with
/// no matching primitive state (`Recovery`), and certificate searches that
/// exhaust their schedule (`CertificateSearch`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("admissibility error: {0}")]
    Admissibility(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("cfl violation: {0}")]
    Cfl(String),
    #[error("conserved-state recovery failed: {0}")]
    Recovery(String),
    #[error("positivity certificate search failed: {0}")]
    CertificateSearch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
