//! Reference computations for the test suites.
//!
//! Everything here is written directly from textbook definitions with plain
//! `nalgebra` matrices and never calls into `histories-core`, so it can serve
//! as an independent check of the engines.

pub mod chain;
pub mod lattice;
pub mod moments;
pub mod pairs;
pub mod sampling;

pub type C64 = nalgebra::Complex<f64>;
pub type CMat = nalgebra::DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}
