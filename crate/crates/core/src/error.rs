use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("input points are pairwise parallel: {0}")]
    ParallelInput(String),
    #[error("joining failed: {0}")]
    JoinFailure(String),
    #[error("empty point set")]
    EmptyInput,
    #[error("circles are equal")]
    EqualCircles,
    #[error("{count} intersection points found, at most 2 allowed")]
    TooManyIntersections { count: usize },
    #[error("circles do not touch ({points} common points)")]
    NotTouching { points: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no touching circle: {0}")]
    NoTouchingCircle(String),
    #[error("sequence spec violates the hypotheses: {0}")]
    SpecViolation(String),
    #[error("trial count must be at least 1")]
    InvalidTrials,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point lies outside the derived plane (parallel to the base point)")]
    OutsideDerivedPlane,
    #[error("points are not collinear")]
    NotCollinear,
    #[error("point has an infinite coordinate")]
    InfiniteCoordinate,
    #[error("region is not contained in the derived plane")]
    RegionOutsideDerivedPlane,
}

pub type Result<T> = std::result::Result<T, GeomError>;
