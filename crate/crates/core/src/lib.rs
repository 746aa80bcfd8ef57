//! Spectral analysis of self-adjoint Toeplitz operators on the Hardy space H²
//! whose symbols are real, bounded and piecewise trigonometric polynomials.
//!
//! The modules build on one another: [`symbol`] describes ω, [`levelset`]
//! computes sublevel sets and multiplicities, [`kernels`] and [`hardy`] supply
//! kernels, singular quadrature and outer-function building blocks,
//! [`spectral`] assembles eigenfunctions and the spectral density,
//! [`diagonal`] implements the diagonalizing map and [`oracle`] checks
//! everything against finite Toeplitz sections.

pub mod diagonal;
pub mod error;
pub mod hardy;
pub mod kernels;
pub mod levelset;
pub mod oracle;
pub mod quadrature;
pub mod spectral;
pub mod symbol;
mod trig;

pub use error::{Error, Result};
pub use num_complex::Complex64;
