use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::CoeffError;

/// Element of the differential field `Q(x1, ..., xn)`.
///
/// Always stored reduced: `gcd(num, den) = 1` and `den` monic, so two equal
/// rational functions are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(i: i64) -> Self {
        Scalar { num: Poly::from_int(i), den: Poly::one() }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar { num: Poly::constant(q), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar { num: p, den: Poly::one() }
    }

    /// The coordinate `x_{i+1}`.
    pub fn var(i: usize) -> Self {
        Scalar::from_poly(Poly::var(i))
    }

    /// Build `num / den`, reducing to canonical form.
    pub fn fraction(num: Poly, den: Poly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::ZeroDivisor);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.constant_value() {
            if c.is_one() {
                return Scalar { num, den };
            }
            return Scalar { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            Scalar { num, den }
        } else {
            let inv = lc.recip();
            Scalar { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Highest variable index referenced plus one.
    pub fn span(&self) -> usize {
        self.num.span().max(self.den.span())
    }

    pub fn inverse(&self) -> Result<Scalar, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::ZeroDivisor);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar, CoeffError> {
        Ok(self * &rhs.inverse()?)
    }

    /// Partial derivative with respect to `x_{i+1}`.
    pub fn derivative(&self, i: usize) -> Scalar {
        let dn = self.num.derivative(i);
        if self.den.is_one() {
            return Scalar { num: dn, den: Poly::one() };
        }
        let dd = self.den.derivative(i);
        if dd.is_zero() {
            return Self::normalize(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::normalize(num, &self.den * &self.den)
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational, CoeffError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(CoeffError::Pole);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Substitute polynomial images for the coordinates.
    pub fn substitute(&self, images: &[Poly]) -> Result<Scalar, CoeffError> {
        Scalar::fraction(self.num.substitute(images), self.den.substitute(images))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        Scalar { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn render(&self, names: &[String]) -> String {
        let n = self.num.render(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.render(names);
        let n = if self.num.num_terms() > 1 { format!("({n})") } else { n };
        let d = if self.den.num_terms() > 1 || !self.den.leading_coeff().is_one() || d.contains('*') {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }

    /// True when the printed form needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        self.num.num_terms() > 1 || !self.den.is_one()
    }

    pub fn is_negative_leading(&self) -> bool {
        self.num.leading_coeff() < BigRational::zero()
    }

    pub fn rational(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return Scalar { num, den: Poly::one() };
            }
            return Scalar::normalize(num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Scalar::normalize(num, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: &self.num * &rhs.num, den: Poly::one() };
        }
        Scalar::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl From<i64> for Scalar {
    fn from(i: i64) -> Self {
        Scalar::from_int(i)
    }
}
