//! Numerical tolerances shared across modules.

/// Structural validation: Hermiticity, unit trace, PSD.
pub const STRUCTURAL: f64 = 1e-10;

/// Numerical round trips (reconstructions, completeness of measurements).
pub const ROUND_TRIP: f64 = 1e-9;

/// Floating-point dust: probabilities and eigenvalues inside this band are snapped.
pub const CLAMP: f64 = 1e-12;

/// Eigenvalues closer than this (relative to the matrix scale) are treated as degenerate.
pub const DEGENERACY: f64 = 1e-9;
