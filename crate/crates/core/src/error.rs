use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A contract on the input (for example hermiticity) does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("Kraus operator {index} is not supported on a single input block")]
    BlockForm { index: usize },
    #[error("map is not completely positive (eigenvalue {min_eigenvalue:e})")]
    NotCp { min_eigenvalue: f64 },
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("multi-relation axiom `{axiom}` fails (residual {residual:e}, witness #{witness})")]
    Axiom {
        axiom: Axiom,
        /// Index of the spanning element that witnesses the failure.
        witness: usize,
        residual: f64,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("synthesis failed: {0}")]
    Synthesis(String),
    /// An internal identity that must hold by construction did not.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

/// The three defining conditions of a quantum multi-relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    Containment,
    Bimodule,
    Center,
}

impl Axiom {
    pub fn as_str(self) -> &'static str {
        match self {
            Axiom::Containment => "containment",
            Axiom::Bimodule => "bimodule",
            Axiom::Center => "center",
        }
    }
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
