//! Finite-truncation models of randomized Euler products, their Gaussian and
//! multiplicative-chaos limits, and CUE characteristic polynomials, with the
//! numerical checks that tie them together.

pub mod error;
pub mod grid;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;

pub mod prime_tools;
pub mod assignment;
pub mod chaos_measures;
pub mod euler_field;
pub mod gauss_field;
pub mod harness;
pub mod meso_chaos;
pub mod rmt_cue;
pub mod spectral_norms;
pub mod zeta_numeric;

pub use error::{Error, Result};
pub use grid::{GridField, GridSpec};
pub use num_complex::Complex64;
pub use prime_tools::PrimeTable;
