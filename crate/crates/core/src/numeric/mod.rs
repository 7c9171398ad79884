//! Exact scalars, certified enclosures, and factored polynomials.

pub mod fint;
mod interval;
mod poly;
mod rational;

pub use interval::RationalInterval;
pub use poly::{CertifiedReal, FactoredPolynomial};
pub use rational::{
    floor_int, fmt_rational, frac, from_f64, gcd_i64, int, midpoint, parse_rational, rat, serde_rational,
    serde_rational_opt_vec, serde_rational_vec, simplest_between, to_f64, ParseRationalError, Rational,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("factored polynomial has degree zero")]
    ZeroDegree,
    #[error("factor coefficient {0} is below -1")]
    FactorBelowMinusOne(String),
    #[error("polynomial {0} needs both a negative and a positive factor coefficient")]
    UnmixedSigns(String),
    #[error("polynomial {0} has no root of p(y) = 1 in (0, 1)")]
    NotPlausible(String),
    #[error("enclosure width must be positive")]
    NonPositiveWidth,
}
