use std::path::PathBuf;

/// Errors raised by the wake model, generators, evaluators and file IO.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("genome length {genome} does not match layout size {layout}")]
    LengthMismatch { genome: usize, layout: usize },
    #[error("objective is undefined for nonpositive total power {0} kW")]
    NoPower(f64),
    #[error("wind scenario rejected: {0}")]
    Scenario(String),
    #[error("position ({x}, {y}) lies outside the {width} x {height} m farm")]
    OutOfExtent { x: f64, y: f64, width: f64, height: f64 },
    #[error("unknown case id `{0}` (expected IA, IB, IC, IIA, IIB, IIC, IIIA, IIIB or IIIC)")]
    UnknownCase(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("config: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }
}
