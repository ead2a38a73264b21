//! Numerics for radial interior transmission eigenvalue problems.
//!
//! The crate is `no_std` (it needs `alloc`). Modules, bottom up:
//!
//! - [`specfun`]: spherical Bessel functions, Riccati–Bessel forms, Legendre polynomials
//! - [`quad`]: Gauss–Legendre rules and adaptive Gauss–Kronrod integration
//! - [`ode`]: an adaptive 8th-order Dormand–Prince integrator over complex states
//! - [`media`]: refractive-index profiles and their Liouville frames
//! - [`radial`]: regular solutions of the radial equation in `r` and in `xi`
//! - [`detroot`]: the transmission determinant, argument-principle zero counting and refinement
//! - [`scatter`]: partial-wave T-matrix, far-field pattern, optical theorem
//! - [`asymlab`]: asymptotic validators and the quotient/residue probes

#![no_std]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod asymlab;
pub mod detroot;
pub mod error;
pub mod fit;
pub mod media;
pub mod ode;
pub mod quad;
pub mod radial;
pub mod scatter;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
