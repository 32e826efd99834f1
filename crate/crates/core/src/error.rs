use thiserror::Error;

use crate::geometry::ChainError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("source lies inside or on an obstacle")]
    SourceInsideObstacle,
    #[error("target lies inside or on an obstacle")]
    TargetInsideObstacle,
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("scene has no target")]
    MissingTarget,
    #[error("no path satisfies the leg-length and turning-angle requirements")]
    NoPath,
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("index does not match: {0}")]
    IndexMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
