use crate::detection::ReceiverMode;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("distance must be positive and finite, got {0}")]
    NonPositiveDistance(f64),
    #[error("area side length must be positive and finite, got {0}")]
    InvalidArea(f64),
    #[error("point ({x}, {y}) lies outside the area")]
    OutOfArea { x: f64, y: f64 },
    #[error("a layout needs at least one AP, one user and one antenna per AP")]
    EmptyLayout,
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("cluster size {size} outside 1..={aps}")]
    ClusterSize { size: usize, aps: usize },
    #[error("user {0} has an empty AP subset")]
    EmptyCluster(usize),
    #[error("AP index {index} out of range for {aps} APs")]
    ApIndex { index: usize, aps: usize },
    #[error("user index {index} out of range for {users} users")]
    UserIndex { index: usize, users: usize },
    #[error("activation probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("user {0} is not active in this slot")]
    InactiveUser(usize),
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("combining vector vanishes after masking")]
    ZeroCombiner,
    #[error("receiver mode {0:?} cannot be used for this computation")]
    ModeMismatch(ReceiverMode),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
