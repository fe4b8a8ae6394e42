//! Summation and quadrature helpers shared by the physics modules.

pub mod quadrature;
pub mod summation;

pub use quadrature::{composite_gauss_legendre, gauss_hermite, gauss_legendre, simplex_rule, Rule};
pub use summation::{CNeumaier, Neumaier};
