//! Symbolic-numeric toolkit for constructing and verifying exact solutions
//! of the semilinear radial reaction-diffusion equation
//! `u_t = u_rr + (n-1) u_r / r + (p - k u^q) u` by reducing its
//! time-translation group-resolving system with separable power ansatzes.
//!
//! Module map:
//! - [`expr`]: restricted computer-algebra core (parse, differentiate,
//!   normalize, substitute, collect powers, evaluate).
//! - [`foliation`]: the group-resolving system, inherited symmetries, and
//!   invariant reductions.
//! - [`reduction`]: separation ansatz, balance enumeration with case
//!   splitting, and closed-form solving of the coefficient systems.
//! - [`catalog`]: machine-readable record of the known closed-form
//!   solutions with constraints and cross-links.
//! - [`verify`]: symbolic and sampled residual checks, pair compatibility,
//!   reconstruction of `u` by integrating the pair ODEs, implicit-solution
//!   evaluation, and invariance classification.
//! - [`pdesim`]: finite-difference integration of the PDE with
//!   convergence-order measurement.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod foliation;
pub mod pdesim;
pub mod reduction;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{parse, Expr, Func, Rational, Symbol};
