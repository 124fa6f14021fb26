//! Certified eigenvalue enclosures in gaps of the essential spectrum.
//!
//! Plain Ritz truncation of a self-adjoint operator is unreliable inside a gap
//! of the essential spectrum: truncations can produce spurious eigenvalues
//! ("spectral pollution") that converge to points which are not in the spectrum
//! at all. This crate implements a pollution-free alternative built on the
//! distance function
//!
//! ```text
//! F_n(λ) = min { ‖Mf − λf‖ : f ∈ L_n, ‖f‖ = 1 } = √(smallest eigenvalue of B_n(λ))
//! B_n(λ) = D_n − 2λ·M_n + λ²·I
//! ```
//!
//! where `M_n` is the compression of the operator to an n-dimensional trial
//! space and `D_n` the corresponding Gram matrix of `Mf`. `F_n` dominates the
//! true distance to the spectrum, so the interval `[λ − F_n(λ), λ + F_n(λ)]`
//! always intersects the spectrum — a one-sided guarantee that cannot be
//! polluted. Combining left- and right-anchored root solves of `F_n` turns this
//! into two-sided enclosures of the isolated eigenvalues in a gap, refined
//! iteratively and across growing truncations.
//!
//! The crate also implements the right-definite Lehmann (Zimmermann–Mertins)
//! bounds and verifies numerically that the two methods produce identical
//! intervals, plus two closed-form model operators (a step multiplication
//! operator and a piecewise-linear one) with analytic spectrum for end-to-end
//! validation, and small demonstrations of how badly plain truncation can fail.
//!
//! Modules, bottom to top:
//!
//! * [`linalg`] — dense symmetric eigensolvers and Cholesky factorization.
//! * [`operator`] — the truncated pair `(M_n, D_n)` and the `B_n(λ)` family.
//! * [`distfun`] — `F_n`, its derivative, graph scans, local minima.
//! * [`enclosure`] — interval bookkeeping, root solves, iterative refinement.
//! * [`lehmann`] — Lehmann bounds and the equivalence check.
//! * [`models`] — the two example operator families and pollution demos.
//!
//! Everything is deterministic: no randomness, no threading, fixed iteration
//! orders — identical inputs produce bit-identical outputs.

pub mod distfun;
pub mod enclosure;
pub mod error;
pub mod lehmann;
pub mod linalg;
pub mod models;
pub mod operator;

pub use error::{Error, Result};
