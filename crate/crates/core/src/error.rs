use crate::network::VertexId;
use crate::plf::TtfError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("arc {tail} -> {head}: {source}")]
    InvalidArc {
        tail: VertexId,
        head: VertexId,
        #[source]
        source: TtfError,
    },
    #[error("infeasible level sizes: {0}")]
    InfeasibleLevels(String),
    #[error("vertex {vertex}: level {level} cell not nested in level {} cell", level + 1)]
    NestingViolation { vertex: VertexId, level: usize },
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("shortcut {from} -> {to} on level {level} is not customized")]
    UnsetSlot { level: usize, from: VertexId, to: VertexId },
    #[error("vertices {from} and {to} are not boundary vertices of a common level-{level} cell")]
    NotInCell { level: usize, from: VertexId, to: VertexId },
    #[error("update of arc {tail} -> {head} rejected: {source}")]
    UpdateRejected {
        tail: VertexId,
        head: VertexId,
        #[source]
        source: TtfError,
    },
    #[error("no arc {tail} -> {head}")]
    NoSuchArc { tail: VertexId, head: VertexId },
    #[error("invalid update: {0}")]
    InvalidUpdate(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error("path expansion mismatch: expected {expected} ms, got {actual} ms")]
    PathMismatch { expected: f64, actual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
