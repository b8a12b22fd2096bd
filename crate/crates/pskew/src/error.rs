use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index list has odd length {0}; a Pfaffian needs an even number of indices")]
    InvalidOrder(usize),
    #[error("invalid index list: {0}")]
    InvalidIndexList(String),
    #[error("entry oracle is not antisymmetric at ({0}, {1})")]
    BadOracle(String, String),
    #[error("moment integral diverges: {0}")]
    DivergentMoment(String),
    #[error("measure support too small: need {need} nodes, have {have}")]
    InsufficientSupport { need: usize, have: usize },
    #[error("tau({n}) at (k,l)=({k},{l}) vanishes; family is degenerate there")]
    DegenerateTau { n: i64, k: i64, l: i64 },
    #[error("tau table has no cell (n,k,l)=({0},{1},{2})")]
    MissingCell(i64, i64, i64),
    #[error("division by zero at lattice site {0}")]
    DegenerateSite(String),
    #[error("oracle violates the premise of the formula: {0}")]
    PremiseViolation(String),
    #[error("series order {have} too short; need at least {need}")]
    InsufficientOrder { need: usize, have: usize },
    #[error("axiom violation: {0}")]
    AxiomViolation(String),
    #[error("numerical blow-up at step {0}")]
    BlowUp(usize),
    #[error("bad configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
