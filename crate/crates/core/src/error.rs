use thiserror::Error;

use crate::graph::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed edge ({reason})")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: loop edge at vertex {vertex}")]
    LoopEdge { line: usize, vertex: usize },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph is not admissible: {}", fmt_violations(.0))]
    NotAdmissible(Vec<Violation>),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("enumeration exceeded the budget of {budget} DFS steps")]
    BudgetExceeded { budget: u64 },

    #[error("prime list is complete only up to length {max_length}, order {order} requested")]
    IncompletePrimeList { max_length: usize, order: usize },

    #[error("series orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },

    #[error("exp requires a zero constant term")]
    NonzeroConstantTerm,

    #[error("composition requires the inner series to have a zero constant term")]
    InnerConstantNonzero,

    #[error("series has no compositional inverse: {0}")]
    NotInvertible(&'static str),

    #[error("G(F(x)) != x to order {order}")]
    InversePairMismatch { order: usize },

    #[error("{available} traces available, order {order} requested")]
    InsufficientTraces { available: usize, order: usize },

    #[error("x = {x} lies outside the domain [0, {limit})")]
    OutOfDomain { x: f64, limit: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    /// True for rejections of well-formed input by the mathematics
    /// (inadmissible graph, argument outside the zeta domain, ...), as
    /// opposed to malformed input.
    pub fn is_domain_rejection(&self) -> bool {
        matches!(
            self,
            Error::NotAdmissible(_)
                | Error::OutOfDomain { .. }
                | Error::SingularMatrix
                | Error::NoConvergence { .. }
                | Error::BudgetExceeded { .. }
                | Error::InvalidParams(_)
        )
    }
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}
