use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("kernel evaluated at the origin")]
    Singular,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("length {length} is not a multiple of the voxel pitch {h}")]
    OffGrid { length: f64, h: f64 },
    #[error("neutrality violated: |set| = {volume}, theta*L^3 = {expected}")]
    Neutrality { volume: f64, expected: f64 },
    #[error("right-hand side has nonzero mean {0}")]
    NonzeroMean(f64),
    #[error("grid too coarse: n = {0} (need n >= 4)")]
    GridTooCoarse(usize),
    #[error("solver did not converge: residual {0}")]
    NoConvergence(f64),
    #[error("template not supported: {0}")]
    TemplateNotSupported(String),
    #[error("no root of the cubic in [1/2, 3/2] for c1 = {c1}, c2 = {c2}")]
    NoRoot { c1: f64, c2: f64 },
    #[error("containment failure: {0}")]
    Containment(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
