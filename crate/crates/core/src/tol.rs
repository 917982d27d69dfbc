//! Numerical tolerances used across the crate.

/// Algebraic identities, normalization, Hermiticity, clamping slack for
/// probabilities computed as traces.
pub const EXACT: f64 = 1e-12;

/// Smallest eigenvalue accepted for a positive semi-definite operator.
pub const PSD: f64 = 1e-10;

/// Non-negativity slack used by the brute-force joint-existence oracle and for
/// reporting negative weights after an inversion.
pub const ORACLE: f64 = 1e-9;

/// Default tolerance for Nash-equilibrium certificates.
pub const NE: f64 = 1e-9;

/// Bracket width at which bisection stops.
pub const BISECTION: f64 = 1e-12;
