//! Numerical tolerances shared by every module.

/// Structural identities: Hermiticity, unit trace, state norms.
pub const STRUCTURAL: f64 = 1e-12;

/// Spectral checks: eigenvalue sums, positive semidefiniteness, Kraus completeness.
pub const SPECTRAL: f64 = 1e-10;

/// Agreement between a closed-form expression and the density-matrix simulation.
pub const FORMULA: f64 = 1e-9;
