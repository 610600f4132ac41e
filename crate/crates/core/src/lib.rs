//! Dirichlet fractional Gaussian fields on the Sierpinski gasket.
//!
//! * [`gasket`]: the pre-gasket graphs `G_m`, exact vertex coordinates,
//!   restriction between levels, discrete measures and Voronoi cells.
//! * [`spectral`]: the Dirichlet Laplacians `-Δ_m`, their spectra, Riesz
//!   kernels, fractional powers, heat semigroups and Dirichlet energies.
//! * [`fields`]: sampling of the discrete fields `X_s^m`, pairings,
//!   covariances, Sobolev norms and structure functions.
//! * [`lab`]: multi-level experiments checking convergence, Weyl
//!   asymptotics, kernel regimes and regularity exponents.

pub mod constants;
pub mod error;
pub mod fields;
pub mod fit;
pub mod gasket;
pub mod io;
pub mod lab;
pub mod rng;
pub mod spectral;

pub use constants::{FractalConstants, CONSTANTS};
pub use error::{Error, Result};
