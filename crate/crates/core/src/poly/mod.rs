//! Sparse multivariate polynomials and monomial bases.

mod exponent;
mod polynomial;
mod random;
mod text;

pub use exponent::{binomial, monomials_in_vars, monomials_of_degree, monomials_up_to, Exponent, MonomialBasis};
pub use polynomial::Polynomial;
pub use random::{random_form, random_pop_instance};
pub use text::{parse_polynomial, write_polynomial};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
