use thiserror::Error;

use crate::graph::VertexId;
use crate::strategy::AgentId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative weight {0}")]
    Negative(String),
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a ring needs at least 3 vertices, got {0}")]
    RingTooSmall(usize),
    #[error("edge {0} has non-positive weight")]
    NonPositiveWeight(usize),
    #[error("homebase {homebase} out of range for {n} vertices")]
    HomebaseOutOfRange { homebase: VertexId, n: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("not a ring: {0}")]
    NotARing(String),
}

/// Why a single move is illegal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("agent {0} was never invoked")]
    UnknownAgent(AgentId),
    #[error("agent {got} invoked out of order, expected {expected}")]
    InvokeOrder { expected: AgentId, got: AgentId },
    #[error("agent {agent} is at {actual}, not {claimed}")]
    WrongPosition {
        agent: AgentId,
        claimed: VertexId,
        actual: VertexId,
    },
    #[error("{from} and {to} are not adjacent")]
    NotAdjacent { from: VertexId, to: VertexId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("illegal move at index {index}: {kind}")]
pub struct StrategyError {
    pub index: usize,
    pub kind: MoveError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("agent {0} does not exist")]
    UnknownAgent(AgentId),
    #[error("port {port} does not exist at the vertex of agent {agent}")]
    BadPort { agent: AgentId, port: usize },
    #[error("query after the graph was fully explored")]
    Exhausted,
    #[error("environment is already in use")]
    NotFresh,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {n} vertices, the search is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("agent cap must be at least 1")]
    BadCap,
    #[error("weights do not fit the integer search domain")]
    Overflow,
    #[error("no exploring strategy found")]
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("labeling covers {labels} vertices, tree has {vertices}")]
    SizeMismatch { labels: usize, vertices: usize },
    #[error("label of vertex {0} is inconsistent with its children")]
    Inconsistent(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("opt cost is zero; the ratio is undefined")]
pub struct ZeroOptError;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed graph document: {0}")]
    Json(serde_json::Error),
    #[error("malformed strategy line {line}: {reason}")]
    StrategyLine { line: usize, reason: String },
    #[error("unknown graph kind `{0}`")]
    UnknownKind(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph document does not specify q")]
    MissingQ,
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}
