//! Hyperbolic singular value decomposition of square matrices.
//!
//! Given a real or complex square matrix `G` and a signature matrix
//! `J = diag(±1)`, the library computes `G = U Σ V⁻¹` with `U` unitary,
//! `V` J-unitary (`V* J V = J`) and `Σ` diagonal non-negative — the
//! hyperbolic SVD.  The eigenvalues of `G J G*` are recovered as
//! `λ_i = σ_i² j_i`; for `J = ±I` the decomposition reduces to the
//! ordinary SVD.
//!
//! The algorithm is a two-sided Kogbetliantz iteration: every step picks a
//! pivot pair `(p, q)`, diagonalizes the 2×2 pivot with a unitary factor
//! from the left and a J-unitary factor from the right, and applies both to
//! the full matrices.  Pivot pairs are chosen *dynamically*, by the exact
//! decrease of the off-diagonal mass each candidate would realize, and
//! disjoint pivots are processed together so the iteration parallelizes
//! while remaining bitwise reproducible for any task count.
//!
//! Module map:
//!
//! - [`fp`], [`dd`], [`scalar`], [`mat2`]: the floating-point substrate —
//!   exponent manipulation, scaling, a reproducible `hypot`, fused complex
//!   arithmetic, double-double oracles for tests and checks;
//! - [`kernel2x2`]: the complete 2×2 hyperbolic SVD;
//! - [`matrix`]: dense column-accessible square matrices and sign
//!   diagonals.

pub mod dd;
pub mod dps;
pub mod driver;
pub mod fp;
pub mod harness;
pub mod io;
pub mod kernel2x2;
pub mod mat2;
pub mod matrix;
pub mod scalar;
pub mod sweep;
