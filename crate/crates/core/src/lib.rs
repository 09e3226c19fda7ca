//! Exact Kerr-medium dynamics of coherent-state superpositions.
//!
//! States live in a truncated Fock basis. Evolution is a diagonal phase, so
//! every observable is computed from the evolved amplitudes directly:
//! quadrature moments by repeated tridiagonal matrix application, Wigner
//! fields from the Laguerre kernel, and Rényi entropies from Hermite-function
//! wavefunctions. Closed-form expressions are exposed for cross-checking.
//!
//! Time is measured in fractions of the revival time `T_rev = π/χ`
//! throughout, written `tau`.

pub mod entropy;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod kerr;
pub mod moments;
pub mod schedule;
pub mod series;
pub mod validate;
pub mod wigner;

pub use error::{Error, Result};
pub use fock::{FockState, SuperpositionSpec};
pub use kerr::{KerrParams, TimeGrid};
pub use series::TimeSeries;

pub use num_complex::Complex64;
