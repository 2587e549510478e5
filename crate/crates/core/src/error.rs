use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("context mismatch: {0}")]
    CtxMismatch(String),
    #[error("element has no Frobenius preimage")]
    NoPreimage,
    #[error("enumeration of {size} elements exceeds the cap of {cap}")]
    TooLarge { size: String, cap: u64 },
    #[error("incompatible sequence at index {index}: defect has p-adic valuation {valuation}")]
    Incompatible { index: usize, valuation: u32 },
    #[error("approximants are not p-adically Cauchy at index {index}")]
    NotCauchy { index: usize },
    #[error("insufficient depth: requested precision {requested}, at most {achievable} reachable")]
    InsufficientDepth { requested: u32, achievable: u32 },
    #[error("element is not in the image of the sharp map")]
    NotInImage,
    #[error("bad element: {0}")]
    BadElement(String),
    #[error("hypothesis fails: {0}")]
    HypothesisFail(String),
    #[error("unsupported value group rank {0}")]
    UnsupportedRank(u32),
    #[error("unknown demo `{0}`")]
    UnknownDemo(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
