//! Parameterized implicit-explicit multistep (IEMS) time integration.
//!
//! The crate builds coefficient triads `(a, b, c)` for six scheme families
//! (WBDF, MBDF, GBDF, NIMEX, SIEMS, BDF), analyses their stability through
//! semi-generating functions on the unit circle, verifies the resulting
//! spectral bounds on discrete orthogonal-convolution (DOC) Toeplitz
//! operators, and demonstrates the expected `O(τ^k)` convergence on small
//! semilinear parabolic problems.
//!
//! Module map:
//!
//! * [`polyring`] — real/rational polynomials, companion-matrix roots, the
//!   root condition, and generator (log-series) expansions;
//! * [`schemes`] — the family catalog, exact coefficient construction,
//!   order-condition solver, and leading truncation coefficients;
//! * [`symbolcalc`] — symbols `a(θ), b(θ), c(θ)` and the stability
//!   indicators σ_F, σ_E, λ_I and intensity 𝔍 = λ_I/σ_E;
//! * [`kernels`] — DOC kernels, composite kernels, and Toeplitz spectral
//!   verification of the indicator bounds;
//! * [`numcore`] — dense LU, symmetric and nonsymmetric eigensolvers, and
//!   power iteration, self-contained;
//! * [`integrator`] — IEMS time stepping on diagonal/dense operators with
//!   manufactured solutions and convergence studies.

pub mod integrator;
pub mod kernels;
pub mod numcore;
pub mod polyring;
pub mod reference;
pub mod schemes;
pub mod symbolcalc;
