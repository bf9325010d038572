use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet order {0} outside 0..=4")]
    OrderOutOfRange(usize),
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("division by a jet with zero constant term")]
    DivisionByZero,
    #[error("derivative needs jet order {needed}, only {available} available")]
    InsufficientOrder { needed: usize, available: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected token {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("malformed number {0:?}")]
    BadNumber(String),
    #[error("unknown identifier {0}")]
    UnknownIdentifier(String),
    #[error("function {name} takes 1 argument, got {got}")]
    Arity { name: String, got: usize },
    #[error("exponent must be a constant expression")]
    NonConstantExponent,
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{func} undefined at argument {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("cannot read chart file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("chart JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing component {0}")]
    MissingComponent(String),
    #[error("unexpected component {0}")]
    UnexpectedComponent(String),
    #[error("component {key}: {source}")]
    Expression { key: String, source: ParseError },
    #[error("bad domain: {0}")]
    BadDomain(String),
    #[error("unknown catalog chart {0}")]
    UnknownChart(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point {0:?} outside the chart domain")]
    OutsideDomain([f64; 4]),
    #[error("structure violation: {invariant} residual {residual:e}")]
    StructureViolation { invariant: &'static str, residual: f64 },
    #[error("evaluation of {key}: {source}")]
    Evaluation { key: String, source: EvalError },
    #[error("{what} needs jet order {needed}, have {available}")]
    InsufficientOrder {
        what: &'static str,
        needed: usize,
        available: usize,
    },
    #[error("coordinate vectors degenerate; no adapted frame")]
    DegenerateFrame,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SandboxError {
    #[error("malformed block {block}: {reason}")]
    MalformedBlock { block: &'static str, reason: String },
}
