use thiserror::Error;

use crate::quadrature::QuadError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Quadrature {
        context: String,
        #[source]
        source: QuadError,
    },
    #[error("basis transform denominator vanishes to working precision (n = {n}, |λ| = {modulus:e})")]
    NearPole { n: usize, modulus: f64 },
    #[error("collocation matrix is singular to working precision (condition estimate {condition_estimate:e})")]
    Singular { condition_estimate: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable category, printed by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Quadrature { .. } => "quadrature",
            Error::NearPole { .. } => "basis",
            Error::Singular { .. } => "solver",
            Error::Shape(_) => "shape",
            Error::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Quadrature { .. } => 3,
            Error::NearPole { .. } => 4,
            Error::Singular { .. } => 5,
            Error::Shape(_) => 6,
            Error::Io(_) => 7,
        }
    }
}

pub(crate) trait QuadContext<T> {
    fn context<C: Into<String>>(self, ctx: C) -> Result<T>;
    fn with_context<C: Into<String>, F: FnOnce() -> C>(self, f: F) -> Result<T>;
}

impl<T> QuadContext<T> for std::result::Result<T, QuadError> {
    fn context<C: Into<String>>(self, ctx: C) -> Result<T> {
        self.map_err(|source| Error::Quadrature { context: ctx.into(), source })
    }

    fn with_context<C: Into<String>, F: FnOnce() -> C>(self, f: F) -> Result<T> {
        self.map_err(|source| Error::Quadrature { context: f().into(), source })
    }
}
