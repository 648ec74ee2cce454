//! Exact arithmetic: rational scalars, sparse multivariate polynomials and
//! rational functions, with differentiation, evaluation in several fields
//! and a small expression parser.

pub mod field;
pub mod gcd;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod univariate;

pub use field::{rational_to_f64, ComplexDd, ComplexDoubleDouble, Complexes, PrimeField, Rationals, Reals, Scalars};
pub use gcd::gcd;
pub use parse::{parse_poly, parse_ratfunc};
pub use poly::{default_names, max_terms, ModPoly, Monomial, MultiPoly};
pub use ratfunc::{compose, denominator_base, RatFunc, RationalFunctions};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
