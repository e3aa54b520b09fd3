use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator vanishes on the unit circle at omega = {omega}")]
    PoleOnUnitCircle { omega: f64 },
    #[error("basis matrix has rank {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("coefficients are not even-symmetric (index {index}, mismatch {mismatch:e})")]
    NotSymmetric { index: usize, mismatch: f64 },
    #[error("passband and stopband images overlap: {0}")]
    QPathUnavailable(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("least-squares step is singular after {retries} damping retries")]
    SingularStep { retries: usize },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
