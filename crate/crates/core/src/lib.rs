//! Exact invariants of the incidence variety compactification of genus-0 strata of
//! d-differentials: boundary combinatorics, ideal-sheaf generators, exceptional divisor,
//! the divisor `D_mu`, intersection numbers on `M_0,n` and volumes.

pub mod cli;
pub mod divisor;
pub mod error;
pub mod family;
pub mod intersection;
pub mod marks;
pub mod strata;

pub use error::{Error, Result};
pub use marks::Marks;

/// Exact rational numbers used throughout.
pub type Rational = num_rational::BigRational;
