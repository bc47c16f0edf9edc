//! Numerical laboratory for weighted holomorphic norms on quasidisks, the
//! Schwarzian equation, Grunsky operators and extremality of harmonic
//! Beltrami coefficients.
//!
//! Everything is deterministic: grids, quadrature subdivision order and
//! random sampling (seeded ChaCha) produce identical output for identical
//! input.

pub mod approx;
pub mod beltrami;
pub mod domains;
pub mod error;
pub mod experiments;
pub mod holo;
pub mod lsq;
pub mod maps;
pub mod maximize;
pub mod mobius;
pub mod ode;
pub mod point;
pub mod quadrature;
pub mod rational;
pub mod schwarzian;
pub mod series;
pub mod grunsky;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use point::{ChartPoint, ComplexValue};
