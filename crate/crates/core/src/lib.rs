pub mod bessel;
pub mod config;
pub mod domain;
pub mod error;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod shape;
pub mod solver;
pub mod suite;
pub mod table;

pub use error::{Error, Result};
