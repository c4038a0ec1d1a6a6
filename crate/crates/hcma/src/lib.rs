//! Adapted complex structures on tangent bundles and homogeneous complex
//! Monge-Ampère (HCMA) foliations near an ample divisor.
//!
//! The crate has two halves that meet in the middle:
//!
//! * **Tube side** ([`geom`], [`tube`]): geodesic flow on real-analytic
//!   surface metrics, complexified Jacobi frames `Y'' + K(σ+iτ)Y = 0`
//!   obtained by spectral continuation of the curvature along closed
//!   geodesics, the ratio `a = Z/Y`, the adapted complex structure
//!   `Jξ = e(η − Re a · ξ)`, and Grauert-tube radius scans. A Zoll surface
//!   of revolution family makes the round/non-round dichotomy observable.
//! * **Divisor side** ([`disk`], [`flow`]): extremal holomorphic disks
//!   attached to the boundary of a model neighborhood of an ample divisor,
//!   found by minimizing the boundary distortion `E(f) = ∂f_n/∂ζ(0)` with a
//!   Riemann-Hilbert factorization driving the gradient, then continued in
//!   the deformation parameter λ and assembled into a Monge-Ampère
//!   foliation whose pulled-back potential `u_λ` solves the HCMA equation.
//!   [`flow`] provides the complex-gradient flows of a strictly
//!   plurisubharmonic exhaustion, leaf uniformization, and the
//!   polynomial-growth test for the coordinate ring.
//!
//! Everything is deterministic: no RNG, no timestamps in payloads, and all
//! batch entry points are reentrant. The `hcma` binary exposes the four
//! batch commands (`tube`, `foliate`, `flow`, `verify`); the `examples/`
//! directory has one runnable program per capability.

pub mod cli;
pub mod disk;
pub mod flow;
pub mod geom;
pub mod report;
pub mod tol;
pub mod tube;

pub use num_complex::Complex64;
