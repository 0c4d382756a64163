//! Numerical kernels: banded eigensolver, periodic quadrature, finite
//! differences, Fourier transforms and seeded random streams.

pub mod banded;
pub mod dft;
pub mod diff;
pub mod jacobi;
pub mod quad;
pub mod rng;

pub use banded::{eigh, eigvalsh, BandedSym};
pub use diff::{central_diff, Derivative, StencilOrder};
pub use quad::{periodic_integral, CompensatedSum};
pub use rng::RngState;
