pub mod analysis;
pub mod error;
pub mod evolution;
pub mod lattice;
pub mod numerics;
pub mod propagator;
pub mod qubit;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use num_rational::Rational64;
