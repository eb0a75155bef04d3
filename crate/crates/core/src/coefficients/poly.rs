//! Sparse multivariate polynomials over the rationals.
//!
//! Monomials are exponent vectors with trailing zeros trimmed, so polynomials
//! built in different ambient dimensions compare structurally. Terms are kept
//! in a `BTreeMap` ordered by degree-reverse-lexicographic order with
//! `x1 < x2 < ... < xn`; the last entry is the leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(Vec<u32>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn from_exponents(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Mono(e)
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Mono(e)
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let n = self.0.len().max(other.0.len());
        let e = (0..n).map(|i| self.exp(i) + other.exp(i)).collect();
        Mono::from_exponents(e)
    }

    pub fn divides(&self, other: &Mono) -> bool {
        (0..self.0.len()).all(|i| self.exp(i) <= other.exp(i))
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Mono) -> Mono {
        let n = other.0.len();
        Mono::from_exponents((0..n).map(|i| other.exp(i) - self.exp(i)).collect())
    }

    fn with_exp(&self, i: usize, e: u32) -> Mono {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = e;
        Mono::from_exponents(v)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            let (a, b) = (self.exp(i), other.exp(i));
            if a != b {
                return b.cmp(&a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(i: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(i)))
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(i: usize) -> Self {
        Self::monomial(Mono::var(i), BigRational::one())
    }

    pub fn monomial(m: Mono, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Mono, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Mono::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            self.terms.get(&Mono::one()).cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    /// Number of variables actually referenced (highest index + 1).
    pub fn span(&self) -> usize {
        self.terms.keys().map(Mono::len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    /// Scale so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                out.add_term(m.with_exp(i, e - 1), c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    let x = point.get(i).cloned().unwrap_or_else(BigRational::zero);
                    t *= num_traits::pow(x, e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Replace variable `i` by `images[i]` (variables beyond `images.len()` are kept).
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            let mut kept = Vec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match images.get(i) {
                    Some(img) => t = &t * &img.pow(e),
                    None => {
                        kept.resize(i + 1, 0);
                        kept[i] = e;
                    }
                }
            }
            if !kept.is_empty() {
                t = t.mul_mono(&Mono::from_exponents(kept), &BigRational::one());
            }
            out = &out + &t;
        }
        out
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Coefficients as a polynomial in `x_v`: entry `k` multiplies `x_v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            out[e].add_term(m.with_exp(v, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if k == 0 {
                out = &out + c;
            } else {
                out = &out + &c.mul_mono(&Mono::var(v).with_exp(v, k as u32), &BigRational::one());
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let tm = dm.quotient_of(rm);
            let tc = rc / &dc;
            rem = &rem - &d.mul_mono(&tm, &tc);
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        if a == b {
            return a.monic();
        }
        let v = a.span().max(b.span()) - 1;
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da == 0 {
            return Poly::gcd(a, &b.content_in(v));
        }
        if db == 0 {
            return Poly::gcd(&a.content_in(v), b);
        }
        let (ca, cb) = (a.content_in(v), b.content_in(v));
        let pa = a.div_exact(&ca).expect("content divides");
        let pb = b.div_exact(&cb).expect("content divides");
        let c = Poly::gcd(&ca, &cb);
        let g = primitive_prs(pa, pb, v);
        (&c * &g).monic()
    }

    /// Gcd of the coefficients with respect to `x_v`.
    pub fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = Poly::gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_part_in(&self, v: usize) -> Poly {
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides")
    }

    /// Render with variable names `names[i]`; missing names fall back to `x{i+1}`.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_mono(m, names);
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

fn render_mono(m: &Mono, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c * lb).collect();
        for (k, bk) in b.iter().enumerate() {
            next[k + shift] = &next[k + shift] - &(bk * &lr);
        }
        next.pop();
        while next.last().is_some_and(Poly::is_zero) {
            next.pop();
        }
        r = next;
    }
    r
}

fn primitive_prs(a: Poly, b: Poly, v: usize) -> Poly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) { (a, b) } else { (b, a) };
    loop {
        let r = prem(&a.coeffs_in(v), &b.coeffs_in(v));
        if r.is_empty() {
            return b.primitive_part_in(v).monic();
        }
        if r.len() == 1 {
            return Poly::one();
        }
        let rp = Poly::from_coeffs_in(v, &r).primitive_part_in(v).monic();
        a = b;
        b = rp;
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

impl<'a> std::ops::Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    fn c(i: i64) -> Poly {
        Poly::from_int(i)
    }

    #[test]
    fn order_puts_low_index_exponents_last() {
        // x3^2 > x2*x3 > x2^2 > x1*x3 under the chosen order
        let m = |e: &[u32]| Mono::from_exponents(e.to_vec());
        assert!(m(&[0, 0, 2]) > m(&[0, 1, 1]));
        assert!(m(&[0, 1, 1]) > m(&[0, 2, 0]));
        assert!(m(&[0, 2, 0]) > m(&[1, 0, 1]));
        assert!(m(&[1]) < m(&[0, 0, 2]));
    }

    #[test]
    fn gcd_of_products() {
        let a = &(&x(0) + &x(1)) * &(&x(0) - &c(2));
        let b = &(&x(0) + &x(1)) * &(&x(1) + &c(3));
        let g = Poly::gcd(&a, &b);
        assert_eq!(g, (&x(0) + &x(1)).monic());
        assert!(Poly::gcd(&x(0), &x(1)).is_one());
    }

    #[test]
    fn gcd_univariate_with_multiplicity() {
        let p = &(&x(0) - &c(1)).pow(3) * &(&x(0) + &c(2));
        let q = &(&x(0) - &c(1)).pow(2) * &(&x(0) + &c(5));
        assert_eq!(Poly::gcd(&p, &q), (&x(0) - &c(1)).pow(2));
    }

    #[test]
    fn gcd_keeps_coefficients_small() {
        let a = &(&(&x(0) * &x(0)) + &(&c(5) * &x(1))) - &c(3);
        let b = &(&(&x(1) * &x(1)) + &(&c(2) * &x(0))) + &c(1);
        let g = &(&x(0) + &x(1)) - &c(1);
        assert_eq!(Poly::gcd(&(&a * &g), &(&b * &g)), g);
        let p = &(&x(0) * &x(1)).pow(3) - &(&c(7) * &x(0)).pow(2);
        let q = &(&x(1).pow(4) * &c(3)) + &(&x(0) * &c(11));
        assert!(Poly::gcd(&(&p * &a), &(&q * &b)).is_one());
    }

    #[test]
    fn div_exact_detects_non_divisibility() {
        let p = &x(0) * &x(1);
        assert_eq!(p.div_exact(&x(1)), Some(x(0)));
        assert_eq!(p.div_exact(&(&x(1) + &c(1))), None);
    }

    #[test]
    fn substitute_linear_images() {
        let p = &x(0) * &x(1);
        let img = vec![x(1), x(0)];
        assert_eq!(p.substitute(&img), p);
        let img = vec![&x(0) + &x(1), x(1)];
        assert_eq!(p.substitute(&img), &(&x(0) * &x(1)) + &(&x(1) * &x(1)));
    }
}
