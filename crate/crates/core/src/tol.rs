//! Default tolerances shared across modules.

/// Structural checks: Hermitian symmetry, exact identities.
pub const STRUCTURAL: f64 = 1e-12;

/// Numerical residuals of dense kernels (eigendecomposition, exponentials).
pub const NUMERICAL: f64 = 1e-10;

/// User-facing feasibility tolerance (CP, ccp, extension residuals).
pub const FEASIBILITY: f64 = 1e-8;
