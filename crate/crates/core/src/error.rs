use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("{0}: input must be nonzero")]
    ZeroInput(&'static str),
    #[error("{0}: input must be nonconstant")]
    ConstantInput(&'static str),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid Drinfeld module: {0}")]
    InvalidModule(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operation requires a module in normal form (a_r = 1)")]
    NotNormalForm,
    #[error("operation requires good reduction everywhere; bad places: {0}")]
    BadReduction(String),
    #[error("base point lies in the packet (Phi_Q(beta) = alpha)")]
    BaseInPacket,
    #[error("base point is torsion; annihilator {annihilator}")]
    TorsionBase { annihilator: String },
    #[error("torsion status undecided after {steps} steps")]
    Undecided { steps: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
}

impl Error {
    /// Errors raised because the caller's inputs violate a documented precondition
    /// (as opposed to malformed text or an internal limit).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::ZeroInput(_)
                | Error::ConstantInput(_)
                | Error::NotNormalForm
                | Error::BadReduction(_)
                | Error::BaseInPacket
                | Error::TorsionBase { .. }
                | Error::Undecided { .. }
                | Error::Precondition(_)
                | Error::DivisionByZero
                | Error::FieldMismatch
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
