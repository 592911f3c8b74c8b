use thiserror::Error;

pub type Result<T> = std::result::Result<T, KkpError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KkpError {
    #[error("beta must be nonzero")]
    ZeroBeta,

    #[error("sigma must be +1 or -1, got {0}")]
    InvalidSigma(i64),

    #[error("no sech-type soliton exists: requires beta < 0, got beta = {0}")]
    NoSoliton(f64),

    #[error("unsupported derivative order {0} (maximum is {1})")]
    UnsupportedOrder(usize, usize),

    #[error("direction angle {0} outside (-pi/2, pi/2)")]
    AngleDomain(f64),

    #[error("odd m power; pair derivatives (requested total order {0})")]
    OddMPower(usize),

    #[error("no positive balance: {0}")]
    NoBalance(String),

    #[error("line soliton not periodic on this box: require mu*ly/lx in Z (got {0})")]
    NotPeriodic(f64),

    #[error("nonzero background p = {0}; pass background handling to accept it")]
    NonzeroBackground(f64),

    #[error("kx = 0 constraint violated: relative norm {0:e} of (kx = 0, ky != 0) modes")]
    ConstraintViolation(f64),

    #[error("solver diverged at step {step}: max |uhat| = {max_abs}")]
    Divergence { step: usize, max_abs: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}
