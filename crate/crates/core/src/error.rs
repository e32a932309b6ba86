use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree {degree} is outside the supported range for this operation")]
    DegreeOutOfRange { degree: usize },
    #[error("invalid index tuple {0:?}")]
    InvalidIndex(Vec<usize>),
    #[error("form is not effective: bot(w) = {0}")]
    NotEffective(String),
    #[error("effective form has an invariant pattern outside the nine orbits: rank {rank}, signature {signature:?}")]
    Unclassifiable {
        rank: usize,
        signature: (usize, usize, usize),
    },
    #[error("map is not symplectic")]
    NotSymplectic,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("case mismatch: {0}")]
    CaseMismatch(String),
    #[error("family mismatch: source is family {src}, target is family {dst}")]
    FamilyMismatch { src: u8, dst: u8 },
    #[error("not a subalgebra of sp(2n): {0}")]
    NotInSp(String),
}

pub type Result<T> = std::result::Result<T, Error>;
