use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{CoeffError, Poly, Scalar};
use crate::linalg;
use crate::ore::{Jet, MultiIndex, Row};

/// Linear change of independent variables `x = A x'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordChange {
    pub matrix: Vec<Vec<BigRational>>,
    inverse: Vec<Vec<BigRational>>,
}

impl CoordChange {
    pub fn new(matrix: Vec<Vec<BigRational>>) -> Option<Self> {
        let inverse = linalg::inverse(&matrix)?;
        Some(CoordChange { matrix, inverse })
    }

    pub fn from_ints(m: &[Vec<i64>]) -> Option<Self> {
        CoordChange::new(
            m.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        CoordChange::from_ints(&m).expect("invertible")
    }

    /// Exchange `x_{a+1}` and `x_{b+1}`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        m.swap(a, b);
        CoordChange::from_ints(&m).expect("invertible")
    }

    /// Random integer matrix with entries in `[-3, 3]` and nonzero determinant.
    pub fn seeded(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            if let Some(c) = CoordChange::from_ints(&m) {
                return c;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == if i == j { BigRational::one() } else { BigRational::zero() }))
    }

    pub fn inverse(&self) -> CoordChange {
        CoordChange { matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }

    /// `self` followed by `next`: `x = A x'`, `x' = B x''` gives `x = AB x''`.
    pub fn then(&self, next: &CoordChange) -> CoordChange {
        let n = self.n();
        let prod = |a: &Vec<Vec<BigRational>>, b: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
                .collect()
        };
        CoordChange { matrix: prod(&self.matrix, &next.matrix), inverse: prod(&next.inverse, &self.inverse) }
    }

    fn images(&self) -> Vec<Poly> {
        self.matrix
            .iter()
            .map(|row| {
                let mut p = Poly::zero();
                for (j, a) in row.iter().enumerate() {
                    if !a.is_zero() {
                        p = &p + &Poly::var(j).scale(a);
                    }
                }
                p
            })
            .collect()
    }

    /// `d_mu` in the old coordinates as a polynomial in the new derivations.
    fn derivation_image(&self, mu: &MultiIndex, cache: &mut BTreeMap<MultiIndex, BTreeMap<MultiIndex, BigRational>>) -> BTreeMap<MultiIndex, BigRational> {
        if let Some(v) = cache.get(mu) {
            return v.clone();
        }
        let out = if mu.is_zero() {
            BTreeMap::from([(MultiIndex::zero(), BigRational::one())])
        } else {
            let i = mu.class().expect("nonzero");
            let rest = self.derivation_image(&mu.minus(i).expect("positive"), cache);
            let mut acc: BTreeMap<MultiIndex, BigRational> = BTreeMap::new();
            for (nu, c) in &rest {
                for j in 0..self.n() {
                    let b = &self.inverse[j][i];
                    if b.is_zero() {
                        continue;
                    }
                    let e = acc.entry(nu.plus(j)).or_insert_with(BigRational::zero);
                    *e += c * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            acc
        };
        cache.insert(mu.clone(), out.clone());
        out
    }

    /// Rewrite a jet expression (or an operator row) in the new coordinates.
    pub fn apply_row(&self, r: &Row) -> Result<Row, CoeffError> {
        let images = self.images();
        let mut cache = BTreeMap::new();
        let mut out = Row::zero();
        for (j, c) in r.terms() {
            let c2 = c.substitute(&images)?;
            for (nu, b) in self.derivation_image(&j.mu, &mut cache) {
                out.add_term(Jet::new(j.unknown, nu), &c2 * &Scalar::from_rational(b));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_exchanges_axes_and_coefficients() {
        let c = CoordChange::swap(3, 0, 2);
        let r = Row::term(Jet::new(0, MultiIndex::from_axes(&[0, 1])), Scalar::var(2));
        let got = c.apply_row(&r).unwrap();
        assert_eq!(got, Row::term(Jet::new(0, MultiIndex::from_axes(&[1, 2])), Scalar::var(0)));
    }

    #[test]
    fn change_then_inverse_is_identity() {
        let c = CoordChange::seeded(3, 7);
        let r = Row::from_terms([
            (Jet::new(0, MultiIndex::from_axes(&[0, 2])), Scalar::var(1)),
            (Jet::new(1, MultiIndex::unit(1)), Scalar::one()),
        ]);
        let back = c.inverse().apply_row(&c.apply_row(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
