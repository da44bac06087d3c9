//! Numerical tolerances shared across the crate.
//!
//! Operators handled here are O(1) in norm and dimensions stay small
//! (d ≤ 16), so absolute tolerances are used throughout. Double precision
//! leaves at least six digits of headroom over the 1e-9 validation band.

/// Hermiticity validation: max allowed |a[i][j] - conj(a[j][i])|.
pub const HERM: f64 = 1e-9;

/// General algebraic identities (traces, sums to identity, Gram deltas).
pub const ALG: f64 = 1e-9;

/// Eigenvalue positivity slack for density operators, effects, and audits.
pub const POS: f64 = 1e-9;

/// Duality residual below which a frame/dual pair counts as exactly dual.
pub const DUAL: f64 = 1e-8;

/// Born-rule residual bound; looser than [`ALG`] because each residual
/// accumulates N·d² rounding terms.
pub const BORN: f64 = 1e-8;

/// Least-squares fit residual bound for sampled linear functionals.
pub const FIT: f64 = 1e-8;

/// Relative cutoff for numerical rank: eigenvalues (or singular values)
/// below `RANK_REL` times the largest are treated as zero.
pub const RANK_REL: f64 = 1e-8;

/// Response-function values above this count as support of an effect.
pub const SUPPORT: f64 = 1e-6;

/// Proportionality residuals above this certify a contradiction witness.
pub const WITNESS: f64 = 1e-6;
