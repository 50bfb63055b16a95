//! Exact scalars and univariate polynomial algebra over them.

mod cyclotomic;
mod field;
mod poly;
mod ratfunc;

pub use cyclotomic::{cyclotomic_polynomial, euler_phi, Cyclotomic};
pub use field::{parse_rational, FieldScalar};
pub use poly::Poly;
pub use ratfunc::RationalFunction;
