use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("pole orders undefined for 0")]
    ZeroPoleOrders,
    #[error("denominator vanishes under specialization: factor {factor}")]
    VanishingDenominator { factor: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a gauge transformation")]
    NotGauge,
    #[error("cyclic vector failed")]
    CyclicVectorFailed,
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("curve is not invariant: {0}")]
    NotInvariant(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("Q\u{2081} singular")]
    Q1Singular,
    #[error("not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("integration failed at t = {t}: {msg}")]
    Integration { t: f64, msg: String },
    #[error("not an invariant subspace")]
    NotInvariantSubspace,
    #[error("unexpected structure: {0}")]
    UnexpectedStructure(String),
    #[error("not regular singular")]
    NotRegularSingular,
    #[error("integer mu = {mu} admits the exponential solution {witness}")]
    IntegerMu { mu: String, witness: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal check failed: {0}")]
    Check(String),
}

impl Error {
    /// True for errors caused by user input rather than a failed self-check.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Check(_) | Error::CyclicVectorFailed | Error::Integration { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
