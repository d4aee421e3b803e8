use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every check in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Row sums, normalizations, unitarity, exact algebraic identities.
    pub structural: f64,
    /// Eigenvalue and singular value comparisons.
    pub spectral: f64,
    /// Entrywise detailed balance.
    pub reversibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { structural: 1e-12, spectral: 1e-9, reversibility: 1e-10 }
    }
}
