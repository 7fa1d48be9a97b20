//! Green functions, absorption probabilities and Martin kernels of zero-drift
//! random walks killed at the boundary of the quarter plane that admit the
//! cubic harmonic function `h(i, j) = i j (i + α j + β)`.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! * [`walk`]: jump kernels, the two-parameter cubic family and harmonicity checks;
//! * [`curve`]: the kernel polynomial `Q(x, y)`, its discriminants and branch points;
//! * [`uniformization`]: the rational parametrization of `{Q = 0}` by the sphere,
//!   the dihedral group of the walk and the alternating orbit sum;
//! * [`green`]: the contour-integral representation of the Green function;
//! * [`asymptotics`]: the constant `C` and the directional asymptotics;
//! * [`martin`]: Martin-kernel ratios built from contour values.
//!
//! Lattice solvers, Monte Carlo and all IO live in the `quarter-green` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod curve;
mod error;
pub mod green;
pub mod martin;
pub mod quadrature;
pub mod sphere;
pub mod uniformization;
pub mod walk;

pub use error::{Error, Result};

pub use num_complex::Complex64;
