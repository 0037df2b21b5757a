//! Exact coefficient arithmetic.

pub mod bernoulli;
pub mod cyclotomic;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod series;

pub use bernoulli::{bernoulli_number, bernoulli_poly};
pub use cyclotomic::Cyclotomic;
pub use poly::{Monomial, Poly, UVars, Var};
pub use rational::{format_rational, int, parse_rational, rat, Exponent, Rational};
pub use scalar::EqScalar;
pub use series::{Series, Series2};
