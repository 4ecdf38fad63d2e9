use thiserror::Error;

use crate::genus3::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("extension degree {n} outside 1..={max}")]
    DegreeOutOfRange { n: u32, max: u32 },
    #[error("modulus {modulus:#x} does not have degree {n}")]
    ModulusDegree { modulus: u64, n: u32 },
    #[error("modulus {modulus:#x} is reducible: divisible by {factor:#x}")]
    ReducibleModulus { modulus: u64, factor: u64 },
    #[error("element {bits:#x} has degree >= {n}")]
    ElementOutOfRange { bits: u32, n: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("invalid curve parameters: {}", join_violations(.0))]
    InvalidParameters(Vec<Violation>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction requires q > 2")]
    FieldTooSmall,
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("search exhausted: q = {q} exceeds the search budget of {max}")]
    SearchBudget { q: u64, max: u64 },
    #[error("no ordinary curve with trace {target} over GF({q})")]
    NoCurveWithTrace { target: i64, q: u64 },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
