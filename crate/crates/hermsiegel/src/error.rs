use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("element is not integral")]
    NonIntegralElement,
    #[error("degenerate lattice")]
    DegenerateLattice,
    #[error("degenerate subspace")]
    DegenerateSubspace,
    #[error("lattices live in different ambient spaces or spans")]
    AmbientMismatch,
    #[error("first lattice is not contained in the second")]
    NotContained,
    #[error("budget exceeded: {what} needs more than {limit}")]
    BudgetExceeded { what: &'static str, limit: u64 },
    #[error("precision overflow: p^{exp} does not fit in the fixed-width residue ring")]
    PrecisionOverflow { exp: u32 },
    #[error("valuation is even; the derivative is only defined for odd valuation")]
    EvenValuation,
    #[error("valuation is odd; the almost self-dual derivative needs even valuation")]
    OddValuation,
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("nonzero remainder in exact polynomial division")]
    RemainderNonzero,
    #[error("lattice is not a vertex lattice of type 3")]
    NotVertexType3,
    #[error("lattice is not a type 3 vertex lattice containing the flat lattice")]
    NotInVert3,
    #[error("ambient space has the wrong determinant parity")]
    WrongAmbientParity,
    #[error("lattice valuation has the wrong parity")]
    WrongParity,
    #[error("internal cross-check failed: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
