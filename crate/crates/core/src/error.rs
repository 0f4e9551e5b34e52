use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n = {0} is out of range ({1})")]
    Dimension(usize, &'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid is not strictly increasing at node {0}")]
    GridNotMonotone(usize),
    #[error("{field} is not positive at node {index} (value {value:e})")]
    NonPositive {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{0} is not finite")]
    NonFinite(&'static str),
    #[error("profile has no minimal hypersphere")]
    NoMinimalSphere,
    #[error("flow aborted: {0}")]
    FlowAbort(String),
    #[error("search failed: {0}")]
    Search(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
