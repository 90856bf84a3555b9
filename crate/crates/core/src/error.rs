use thiserror::Error;

use crate::formula::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arity {arity} exceeds the cap of {cap} for {what}")]
    ArityCap {
        what: &'static str,
        arity: usize,
        cap: usize,
    },
    #[error("unknown function family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters for family `{family}`: {reason}")]
    FamilyParams { family: String, reason: String },
    #[error("variable index {index} out of range for arity {arity}")]
    VariableIndex { index: usize, arity: usize },
    #[error("variable {0} assigned more than once")]
    DuplicateAssignment(usize),
    #[error("invalid function spec `{spec}`: {reason}")]
    FunctionSpec { spec: String, reason: String },
    #[error("epsilon {0} is outside [0, 1/2)")]
    Epsilon(f64),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("weight scheme infeasible at input {input}, bit {bit}: w(x,i)*w(x^i,i) = {product}")]
    InfeasibleScheme {
        input: usize,
        bit: usize,
        product: f64,
    },
    #[error("weight scheme has empty support (constant function)")]
    EmptySupport,
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("unknown graph property `{0}`")]
    UnknownProperty(String),
    #[error(transparent)]
    Formula(#[from] ParseError),
}

pub(crate) fn check_arity(what: &'static str, arity: usize, cap: usize) -> Result<()> {
    if arity > cap {
        Err(Error::ArityCap { what, arity, cap })
    } else {
        Ok(())
    }
}
