use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative jump rate q[{0}][{1}]")]
    NegativeRate(usize, usize),
    #[error("potential c[{0}] exceeds the total rate q[{0}]")]
    PotentialExceedsRate(usize),
    #[error("total rate q[{0}] is smaller than the sum of its jump rates")]
    NotTotallyStable(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rate sequence has no value at index {0}")]
    MissingRate(usize),
    #[error("overflow at index {index}")]
    Overflow { index: usize },
    #[error("iteration diverged at step {iteration} (max value {value:e})")]
    Divergence { iteration: usize, value: f64 },
    #[error("no convergence after {iterations} iterations (last change {delta:e})")]
    NonConvergence { iterations: usize, delta: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("h is not harmonic (max residual {residual:e} at state {index})")]
    NotHarmonic { index: usize, residual: f64 },
    #[error("h is not harmonic at state {index} of the harmonic set (residual {residual:e})")]
    NotLocallyHarmonic { index: usize, residual: f64 },
    #[error("h is not strictly positive at state {0}")]
    NonpositiveH(usize),
    #[error("measure does not symmetrize the chain (worst pair ({i}, {j}), relative violation {violation:e})")]
    NotReversible { i: usize, j: usize, violation: f64 },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("tail of the Hardy sum not resolved (partial suprema {half:e} at N/2, {full:e} at N)")]
    TailNotResolved { half: f64, full: f64 },
    #[error("h is not harmonic at x = {x} (residual {residual:e})")]
    NotHarmonicAt { x: f64, residual: f64 },
    #[error("h vanishes at x = {x}")]
    ZeroH { x: f64 },
    #[error("Riccati solution blew up near x = {x}")]
    BlowUp { x: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}
