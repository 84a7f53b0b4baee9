use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The input lies outside the region a projection can represent.
    #[error("point outside the projectable domain")]
    OutOfDomain,

    #[error("parameter `{name}` = {value} is out of range; nearest valid value is {suggestion}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        suggestion: f64,
    },

    #[error("degenerate edge: endpoints are coincident or antipodal")]
    DegenerateEdge,

    #[error("degenerate line segment")]
    DegenerateLine,

    #[error("ray is parallel to the triangle plane")]
    GrazingRay,

    #[error("polygon is not planar (deviation {0:e})")]
    NonPlanar(f64),

    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("subdivision exceeded {0} levels")]
    SubdivisionLimit(usize),

    #[error("unknown projection type `{0}`")]
    UnknownProjection(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("missing asset {0}")]
    MissingAsset(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
