//! Dense Gaussian elimination over an exact field.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coefficients::Scalar;

pub trait Field: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Inverse of a nonzero element.
    fn inv(&self) -> Self;
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        self.inverse().expect("nonzero pivot")
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(m: &mut [Vec<F>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let v = m[r][k].mul(&f);
                    m[i][k] = m[i][k].sub(&v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Basis of the right kernel `{v : M v = 0}`.
pub fn nullspace<F: Field>(m: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut w = m.to_vec();
    let piv = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (r, &p) in piv.iter().enumerate() {
                v[p] = F::zero().sub(&w[r][f]);
            }
            v
        })
        .collect()
}

/// Solve `M v = b`, returning one solution if consistent.
pub fn solve<F: Field>(m: &[Vec<F>], b: &[F], cols: usize) -> Option<Vec<F>> {
    let mut w: Vec<Vec<F>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut w);
    if piv.contains(&cols) {
        return None;
    }
    let mut v = vec![F::zero(); cols];
    for (r, &p) in piv.iter().enumerate() {
        v[p] = w[r][cols].clone();
    }
    Some(v)
}

pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut w = m.to_vec();
    let mut det = <BigRational as One>::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !Zero::is_zero(&w[i][c])) else { return <BigRational as Zero>::zero() };
        if p != c {
            w.swap(p, c);
            det = -det;
        }
        det *= &w[c][c];
        let inv = w[c][c].recip();
        for i in c + 1..n {
            if !Zero::is_zero(&w[i][c]) {
                let f = &w[i][c] * &inv;
                for k in c..n {
                    let v = &w[c][k] * &f;
                    w[i][k] -= v;
                }
            }
        }
    }
    det
}

pub fn inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut w: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { <BigRational as One>::one() } else { <BigRational as Zero>::zero() }));
            row
        })
        .collect();
    let piv = rref(&mut w);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(w.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn inverse_and_determinant() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        assert_eq!(determinant(&m), q(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert!(inverse(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s: BigRational = m[0].iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(Zero::is_zero(&s));
        }
    }
}
