use thiserror::Error;

/// Errors raised by the numerics library and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// Inadmissible grid or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Fields with incompatible geometry were combined.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Linearly dependent directions or constraints.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    /// A configuration scale would wrap around the torus.
    #[error("wraparound risk: {0}")]
    Wraparound(String),
    /// Numerical quadrature failed its own refinement check.
    #[error("quadrature under-resolved: {0}")]
    Quadrature(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal diagnostics attached to a computed value.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A kernel scale below two grid cells.
    UnderResolved { what: &'static str, scale: f64, spacing: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::UnderResolved { what, scale, spacing } => write!(
                f,
                "{what}: scale {scale:.4e} below two grid cells (spacing {spacing:.4e})"
            ),
        }
    }
}

/// A value together with the warnings produced while computing it.
#[derive(Debug, Clone)]
pub struct Checked<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Checked<T> {
    pub fn clean(value: T) -> Self {
        Checked { value, warnings: Vec::new() }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Checked<U> {
        Checked { value: f(self.value), warnings: self.warnings }
    }
}
