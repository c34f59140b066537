use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The exact metric is only defined off the axis `(x, y) = (0, 0)`.
    #[error("point ({x}, {y}) lies on the axis where the exact metric is undefined")]
    OnAxis { x: f64, y: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("curve is not uniformly timelike at eps = {eps}, s = {s}: g(v, v) = {value} > -eps^q = {bound}")]
    NotUniformlyTimelike {
        eps: f64,
        s: f64,
        value: f64,
        bound: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
