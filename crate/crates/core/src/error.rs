use crate::lattice::Site;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("lattice spacing must be positive, got {0}")]
    BadSpacing(f64),

    #[error("field has no value at site ({},{})", .0.i1, .0.i2)]
    MissingValue(Site),

    #[error("sites ({},{}) and ({},{}) are not lattice neighbours", .0.i1, .0.i2, .1.i1, .1.i2)]
    NotNeighbours(Site, Site),

    #[error("loop is not closed or has non-neighbour steps")]
    BrokenLoop,

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid argument: {0}")]
    BadArgument(String),

    #[error("solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
