use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hyperedge #{index} is empty")]
    EmptyHyperedge { index: usize },
    #[error("vertex {0:?} belongs to no hyperedge")]
    DanglingVertex(String),
    #[error("Sperner violation: hyperedge {smaller:?} is a strict subset of {larger:?}")]
    SpernerViolation {
        smaller: Vec<String>,
        larger: Vec<String>,
    },
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertexId(String),
    #[error("duplicate hyperedge {0:?}")]
    DuplicateHyperedge(Vec<String>),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("{what} has size {size}, above the limit of {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("unknown library name {0:?}")]
    UnknownName(String),
    #[error("weight of vertex {vertex:?} must be strictly positive, got {value}")]
    NonPositiveWeight { vertex: String, value: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("SDP solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("probability of {vertex:?} is negative ({value})")]
    NegativeProbability { vertex: String, value: String },
    #[error("probabilities on hyperedge {hyperedge:?} sum to {sum}, not 1")]
    NormalizationFailure { hyperedge: Vec<String>, sum: String },
    #[error("no probability given for vertex {0:?}")]
    MissingProbability(String),
    #[error("model is not in CE1: clique {clique:?} sums to {sum}")]
    NotInCE1 { clique: Vec<String>, sum: String },
    #[error("scenario has no indeterministic extremal models; beta is undefined")]
    NoIndeterministicVertices,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parameter {name} = {value} is out of range")]
    BadParameter { name: &'static str, value: f64 },
    #[error("realization check {check} failed (residual {residual:e})")]
    InvariantViolation { check: String, residual: f64 },
    #[error("data table has no pairing for hyperedge #{0}")]
    MissingPairing(usize),
    #[error("data table has no star-source section")]
    MissingStarSource,

    #[error("alpha* equals alpha; the inequality is undefined")]
    DegenerateInvariants,
    #[error("decomposition over extremal models failed: {0}")]
    DecompositionFailure(String),
}

impl Error {
    /// True for failures of the numerical kernels rather than of the input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Infeasible
                | Error::Unbounded
                | Error::NoConvergence { .. }
                | Error::DecompositionFailure(_)
        )
    }
}
