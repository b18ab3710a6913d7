//! Certified upper bounds for correlation functionals of band-limited
//! functions whose Fourier transform is supported in a scaled polytope.
//!
//! The crate evaluates Gram systems `A[i][j] = nu_n(g_i g_j)`,
//! `b[i] = g_i(0)` over bases of symmetric functions, solves the rank-one
//! reduction of the resulting semidefinite program and certifies the bound
//! `c^T A c / (c^T b)^2` with exact or interval arithmetic.

pub mod arith;
pub mod correlation;
pub mod error;
pub mod fourier;
pub mod kernel2;
pub mod solver;
pub mod symmetry;

pub use error::{Error, Result};
