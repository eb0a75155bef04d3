//! Exact arithmetic in the coefficient field `K = Q(x1, ..., xn)`.

mod poly;
mod scalar;

pub use poly::{Mono, Poly};
pub use scalar::Scalar;

use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("zero-divisor")]
    ZeroDivisor,
    #[error("pole")]
    Pole,
}

/// A rational point used to evaluate scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point(pub Vec<BigRational>);

impl Point {
    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }
}

impl Scalar {
    pub fn evaluate_at(&self, p: &Point) -> Result<BigRational, CoeffError> {
        self.evaluate(&p.0)
    }
}
