//! Exact and numerical machinery for exponential period integrals.
//!
//! The crate is organised by layer:
//!
//! - [`sa_domain`]: exact scalars over ℚ(i), sparse polynomials, rational
//!   functions and forms, the expression grammar, strips, boundary directions
//!   of the blown-up projective line, sign-condition regions and
//!   pseudo-orientations.
//! - [`simplex`]: geometric simplicial complexes over ℚ, barycentric
//!   subdivision, the closed core and the straight-line deformation retraction.
//! - [`chain`]: chain complexes over ℚ, relative simplicial chains, cones,
//!   total complexes and Čech double complexes.
//! - [`blowup`]: cell models of the rapid-decay spaces `B∘` and `B♯` for
//!   genus-0 curves, and polar charts of the oriented real blow-up.
//! - [`derham`]: the twisted differential `d_f` and truncated cohomology of
//!   `(𝔸¹, Y, f)`.
//! - [`period`]: adaptive Gauss–Kronrod evaluation of `∫ e^{-f} ω` with
//!   properness gating, relative pairings, Stokes residuals and period
//!   matrices.
//! - [`volume`]: integrals as signed volumes of graph regions and the
//!   mesh-based combination of signed volumes.

pub mod blowup;
pub mod chain;
pub mod derham;
pub mod linalg;
pub mod period;
pub mod sa_domain;
pub mod simplex;
pub mod volume;

/// Exact rational scalar used by every exact layer.
pub type Rational = num_rational::BigRational;

pub use sa_domain::{GaussianRational, RatForm, RatFunc};
