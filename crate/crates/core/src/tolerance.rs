use crate::error::{Error, Result};

/// Entries below this magnitude count as exact zeros when checking the
/// block form of Kraus operators or dropping vanishing ones.
pub const ZERO_ENTRY: f64 = 1e-12;

/// Singular values below this absolute floor never contribute to a span,
/// whatever the relative cutoff says.
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// Hermiticity tolerance, relative to the Frobenius norm.
pub const HERMITIAN: f64 = 1e-9;

/// Numerical thresholds used across the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Subspace equality/containment, multiplied by the ambient dimension.
    pub eq: f64,
    /// Smallest admissible Choi eigenvalue, relative to the Choi norm.
    pub psd: f64,
    /// Residual allowed in multi-relation axiom checks, relative to the element norm.
    pub axiom: f64,
    /// A classical transition product `p(y|x1) p(y|x2)` above this is an edge.
    pub edge: f64,
    /// Absolute tolerance for identities between maps and matrices.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank: 1e-10, eq: 1e-8, psd: 1e-9, axiom: 1e-8, edge: 1e-12, identity: 1e-8 }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 6] = ["rank", "eq", "psd", "axiom", "edge", "identity"];

    /// Subspace comparison threshold for operators on a space of dimension `ambient`.
    pub fn eq_for(&self, ambient: usize) -> f64 {
        self.eq * ambient.max(1) as f64
    }

    /// Override one tolerance by name. Accepts the bare name or a `tol_` prefix.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Argument(format!("tolerance {name} must be finite and >= 0")));
        }
        let slot = match name.strip_prefix("tol_").unwrap_or(name) {
            "rank" => &mut self.rank,
            "eq" => &mut self.eq,
            "psd" => &mut self.psd,
            "axiom" => &mut self.axiom,
            "edge" => &mut self.edge,
            "identity" => &mut self.identity,
            other => {
                return Err(Error::Argument(format!(
                    "unknown tolerance `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}
