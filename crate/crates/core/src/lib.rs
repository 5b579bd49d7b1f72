//! Numerical verification of sharp L^p Hardy and Rellich inequalities for
//! sums of squares of vector fields: Euclidean space, the Heisenberg group,
//! Heisenberg–Greiner and Baouendi–Grushin operators.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: the pointwise identity behind the convexity argument and the constant `c_p`;
//! * [`frames`]: vector fields, gauges and the operators `∇_L`, `L`, `L_p`;
//! * [`constants`]: sharp constants, admissibility and extremal exponents;
//! * [`testfns`]: cut-offs, extremal sequences and random bumps;
//! * [`quadrature`]: Monte Carlo over gauge annuli and the radial reduction;
//! * [`verify`]: inequality chains, sharpness sweeps and audits.
//!
//! Monte-Carlo batches run on rayon with the default `parallel` feature;
//! results do not depend on the thread count.

pub mod algebra;
pub mod constants;
pub mod error;
pub mod fd;
pub mod frames;
pub mod mc;
pub mod quad1d;
pub mod quadrature;
pub mod testfns;
pub mod verify;

pub use error::{Error, Result};
