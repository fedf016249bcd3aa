//! Scalars, prime factorization and the dilogarithm.

mod dilog;
mod factor;
mod scalar;

pub use dilog::{bloch_wigner, dilog};
pub use factor::{factor, factor_u64, factor_uint, is_prime_u64, PrimeFactorization};
pub use scalar::{rat, rat_to_f64, Field, QuadExt, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("cannot factor zero")]
    ZeroInput,
    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(i64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}
