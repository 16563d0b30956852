use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge #{index} ({from} -> {to}) references a node outside 1..={n}")]
    NodeOutOfRange {
        index: usize,
        from: usize,
        to: usize,
        n: usize,
    },
    #[error("edge #{index} is a self-loop on node {node}")]
    SelfLoop { index: usize, node: usize },
    #[error("edge #{index} ({from} -> {to}) has weight {weight}; weights must be positive and finite")]
    NonPositiveWeight {
        index: usize,
        from: usize,
        to: usize,
        weight: f64,
    },
    #[error("edge #{index} ({from} -> {to}) duplicates an earlier edge")]
    DuplicateEdge { index: usize, from: usize, to: usize },
    #[error("not a Laplacian: {0}")]
    NotALaplacian(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("eigenvalue iteration did not converge")]
    EigensolverFailure,
    #[error("singular value decomposition did not converge")]
    SvdFailure,
    #[error("left/right null spaces are inconsistent (found {right} right and {left} left null vectors)")]
    DegenerateNullSpace { right: usize, left: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bias is not balanced on the zero modes (largest projection {max_projection:e})")]
    NotStable { max_projection: f64 },
    #[error("steady-state solve failed")]
    SolverFailure,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("switching time must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("invalid control schedule: {0}")]
    InvalidSchedule(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(&'static str),
    #[error("duration must be non-negative and finite, got {0}")]
    InvalidDuration(f64),
    #[error("matrix exponential failed")]
    ExpmFailure,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("node {node} is assigned to group {group}, which has no value")]
    IncompleteAssignment { node: usize, group: usize },
    #[error("groups {first} and {second} share the same value")]
    DuplicateGroupValue { first: usize, second: usize },
}
