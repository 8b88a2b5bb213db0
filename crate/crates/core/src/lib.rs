//! Numerical laboratory for the fine regularity of Lévy processes and
//! lacunary random wavelet series.
//!
//! The crate simulates jump Poisson measures and coefficient supports,
//! computes the exponent calculus of gauge functions and moduli of
//! continuity, builds finite-resolution approximation (limsup) sets, and
//! estimates Hölder singularity spectra, dyadic net measures and box
//! dimensions from them.

pub mod error;
pub mod exponents;
pub mod export;
pub mod gauge;
pub mod intervals;
pub mod jumps;
pub mod lacunary;
pub mod levy;
pub mod limsup;
pub mod measure;
pub mod modulus;
pub mod netmeasure;
pub mod path;
pub mod rng;
pub mod spectrum;
pub mod series;

pub use error::{Error, Result};
