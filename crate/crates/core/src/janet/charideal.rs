use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coefficients::{Mono, Poly, Scalar};
use crate::ore::{binomial, MultiIndex};

use super::basis::JanetBasis;

/// Largest number of maximal minors evaluated before giving up on generators.
pub const MINOR_CAP: u64 = 500;

/// Polynomial in the covector variables with coefficients in K.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CharPoly(BTreeMap<MultiIndex, Scalar>);

impl CharPoly {
    pub fn zero() -> Self {
        CharPoly(BTreeMap::new())
    }

    fn add_term(&mut self, mu: MultiIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let s = match self.0.remove(&mu) {
            Some(old) => &old + &c,
            None => c,
        };
        if !s.is_zero() {
            self.0.insert(mu, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &CharPoly) -> CharPoly {
        let mut r = self.clone();
        for (m, c) in &o.0 {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> CharPoly {
        CharPoly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn mul(&self, o: &CharPoly) -> CharPoly {
        let mut r = CharPoly::zero();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                r.add_term(a.add(b), x * y);
            }
        }
        r
    }

    /// The same polynomial over Q, when all coefficients are constants.
    pub fn to_rational(&self) -> Option<Poly> {
        let mut p = Poly::zero();
        for (mu, c) in &self.0 {
            p.add_term(Mono::from_exponents(mu.exponents().to_vec()), c.constant_value()?);
        }
        Some(p)
    }

    pub fn render(&self, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let names = chi_names(self.0.keys().map(|m| m.span()).max().unwrap_or(0));
        let mut out = String::new();
        for (idx, (mu, c)) in self.0.iter().rev().enumerate() {
            let (neg, mag) = if c.is_negative_leading() { (true, -c) } else { (false, c.clone()) };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = Poly::monomial(Mono::from_exponents(mu.exponents().to_vec()), BigRational::one()).render(&names);
            if mag.is_one() {
                out.push_str(&mono);
            } else {
                let s = mag.render(vars);
                let s = if mag.is_compound() { format!("({s})") } else { s };
                if mu.is_zero() {
                    out.push_str(&s);
                } else {
                    out.push_str(&format!("{s}*{mono}"));
                }
            }
        }
        out
    }
}

pub fn chi_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("χ{i}")).collect()
}

fn det(m: &[Vec<CharPoly>]) -> CharPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = CharPoly::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<CharPoly>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect()).collect();
        let t = m[0][c].mul(&det(&minor));
        acc = if c % 2 == 0 { acc.add(&t) } else { acc.add(&t.neg()) };
    }
    acc
}

fn combinations(p: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, p: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..p {
            cur.push(i);
            rec(i + 1, p, k, cur, out);
            cur.pop();
        }
    }
    rec(0, p, k, &mut cur, &mut out);
    out
}

/// A prime component: linear forms and/or irreducible polynomials over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prime {
    pub generators: Vec<Poly>,
}

#[derive(Clone, Debug)]
pub struct CharIdeal {
    pub n: usize,
    /// `None` when the number of minors exceeds [`MINOR_CAP`].
    pub generators: Option<Vec<CharPoly>>,
    /// Minimal primes of the radical, when computable under the limited policy.
    pub radical: Option<Vec<Prime>>,
    pub dimension: usize,
    pub codimension: usize,
}

impl CharIdeal {
    pub fn render_generators(&self, vars: &[String]) -> Option<Vec<String>> {
        self.generators.as_ref().map(|g| g.iter().map(|p| p.render(vars)).collect())
    }

    /// Radical as an intersection of primes, e.g. `(χ3, χ2 - χ1) ∩ (χ3, χ2)`.
    pub fn render_radical(&self) -> Option<String> {
        let names = chi_names(self.n);
        self.radical.as_ref().map(|primes| {
            if primes.is_empty() {
                return "(0)".to_string();
            }
            primes
                .iter()
                .map(|p| format!("({})", p.generators.iter().map(|g| g.render(&names)).collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join(" ∩ ")
        })
    }
}

/// Symbol matrix rows: one per order-`q` basis row, one column per unknown.
fn symbol_rows(b: &JanetBasis) -> Vec<Vec<CharPoly>> {
    b.rows()
        .iter()
        .filter(|r| r.order() == Some(b.q))
        .map(|r| {
            let mut row = vec![CharPoly::zero(); b.m];
            for (j, c) in r.terms() {
                if j.order() == b.q {
                    row[j.unknown].add_term(j.mu.clone(), c.clone());
                }
            }
            row
        })
        .collect()
}

pub fn characteristic_ideal(b: &JanetBasis) -> CharIdeal {
    let n = b.n;
    let codimension = b.codimension();
    let dimension = n - codimension;
    let rows = symbol_rows(b);
    let generators: Option<Vec<CharPoly>> = if b.differential_rank() > 0 {
        Some(Vec::new())
    } else if b.m == 1 {
        Some(rows.into_iter().map(|mut r| r.remove(0)).filter(|p| !p.is_zero()).collect())
    } else if binomial(rows.len() as u64, b.m as u64) > MINOR_CAP || b.m > 6 {
        None
    } else {
        let mut out: Vec<CharPoly> = Vec::new();
        for pick in combinations(rows.len(), b.m) {
            let sub: Vec<Vec<CharPoly>> = pick.iter().map(|&i| rows[i].clone()).collect();
            let d = det(&sub);
            if !d.is_zero() && !out.contains(&d) {
                out.push(d);
            }
        }
        Some(out)
    };
    let radical = generators.as_ref().and_then(|g| radical_of(g, n));
    CharIdeal { n, generators, radical, dimension, codimension }
}

fn radical_of(gens: &[CharPoly], n: usize) -> Option<Vec<Prime>> {
    if gens.is_empty() {
        return Some(Vec::new());
    }
    let polys: Vec<Poly> = gens.iter().map(CharPoly::to_rational).collect::<Option<_>>()?;
    if polys.iter().any(|p| p.is_constant()) {
        return Some(vec![Prime { generators: vec![Poly::one()] }]);
    }
    let factored: Vec<Option<Vec<Poly>>> = polys.iter().map(|p| irreducible_factors(p, n)).collect();
    let mut leaves: Vec<Component> = Vec::new();
    search(&polys, &factored, 0, Component::default(), n, &mut leaves)?;
    // keep minimal components
    let mut minimal: Vec<Component> = Vec::new();
    for (i, c) in leaves.iter().enumerate() {
        let dominated = leaves.iter().enumerate().any(|(j, d)| {
            j != i && d.contained_in(c, n) == Some(true) && !(c.contained_in(d, n) == Some(true) && j > i)
        });
        if !dominated {
            minimal.push(c.clone());
        }
    }
    Some(minimal.into_iter().map(|c| c.to_prime(n)).collect())
}

#[derive(Clone, Debug, Default)]
struct Component {
    /// RREF rows of linear forms, pivots on the highest variable.
    linear: Vec<Vec<BigRational>>,
    nonlinear: Vec<Poly>,
}

fn linear_coeffs(p: &Poly, n: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n];
    for (m, c) in p.terms() {
        if let Some(i) = m.exponents().iter().position(|&e| e == 1) {
            v[i] = c.clone();
        }
    }
    v
}

impl Component {
    fn add_linear(&self, l: &Poly, n: usize) -> Component {
        let mut rows = self.linear.clone();
        rows.push(linear_coeffs(l, n));
        // reverse columns so pivots land on the highest variable
        let mut rev: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().rev().cloned().collect()).collect();
        let piv = crate::linalg::rref(&mut rev);
        rev.truncate(piv.len());
        let linear = rev.into_iter().map(|r| r.into_iter().rev().collect()).collect();
        Component { linear, nonlinear: self.nonlinear.clone() }
    }

    /// Images eliminating the pivot variables.
    fn images(&self, n: usize) -> Vec<Poly> {
        let mut imgs: Vec<Poly> = (0..n).map(Poly::var).collect();
        for r in &self.linear {
            let p = (0..n).rev().find(|&i| !r[i].is_zero()).expect("nonzero row");
            let mut img = Poly::zero();
            for j in 0..n {
                if j != p && !r[j].is_zero() {
                    img = &img - &Poly::var(j).scale(&(&r[j] / &r[p]));
                }
            }
            imgs[p] = img;
        }
        imgs
    }

    /// `Some(true)` when `g` vanishes on the component, `None` when undecided.
    fn vanishes(&self, g: &Poly, n: usize) -> Option<bool> {
        let g = if self.linear.is_empty() { g.clone() } else { g.substitute(&self.images(n)) };
        if g.is_zero() {
            return Some(true);
        }
        match self.nonlinear.len() {
            0 => Some(false),
            1 if self.linear.is_empty() => Some(g.div_exact(&self.nonlinear[0]).is_some()),
            _ => None,
        }
    }

    /// Whether the ideal of `self` is contained in the ideal of `other`.
    fn contained_in(&self, other: &Component, n: usize) -> Option<bool> {
        for g in self.generators(n) {
            if other.vanishes(&g, n)? {
                continue;
            }
            return Some(false);
        }
        Some(true)
    }

    fn generators(&self, n: usize) -> Vec<Poly> {
        let mut out: Vec<Poly> = self
            .linear
            .iter()
            .map(|r| {
                let mut p = Poly::zero();
                for (i, c) in r.iter().enumerate() {
                    if !c.is_zero() {
                        p = &p + &Poly::var(i).scale(c);
                    }
                }
                p.monic()
            })
            .collect();
        let _ = n;
        out.extend(self.nonlinear.iter().cloned());
        out
    }

    fn to_prime(&self, n: usize) -> Prime {
        Prime { generators: self.generators(n) }
    }
}

fn search(
    polys: &[Poly],
    factored: &[Option<Vec<Poly>>],
    k: usize,
    comp: Component,
    n: usize,
    leaves: &mut Vec<Component>,
) -> Option<()> {
    if k == polys.len() {
        leaves.push(comp);
        return Some(());
    }
    if comp.vanishes(&polys[k], n)? {
        return search(polys, factored, k + 1, comp, n, leaves);
    }
    let factors = factored[k].as_ref()?;
    for f in factors {
        let next = if f.total_degree() == 1 {
            if !comp.nonlinear.is_empty() {
                return None;
            }
            comp.add_linear(f, n)
        } else {
            if !comp.linear.is_empty() || !comp.nonlinear.is_empty() {
                return None;
            }
            Component { linear: Vec::new(), nonlinear: vec![f.monic()] }
        };
        search(polys, factored, k + 1, next, n, leaves)?;
    }
    Some(())
}

/// Distinct irreducible factors over Q under the limited policy.
pub fn irreducible_factors(g: &Poly, n: usize) -> Option<Vec<Poly>> {
    if g.is_zero() {
        return None;
    }
    let mut h = g.clone();
    for i in 0..n {
        h = Poly::gcd(&h, &g.derivative(i));
    }
    let mut s = g.div_exact(&h)?;
    let mut out = Vec::new();
    for i in 0..n {
        let x = Poly::var(i);
        if let Some(q) = s.div_exact(&x) {
            out.push(x);
            s = q;
        }
    }
    if s.is_constant() {
        return Some(out);
    }
    match s.total_degree() {
        1 => out.push(s.monic()),
        2 => match split_quadric(&s, n) {
            Some((a, b)) => {
                out.push(a.monic());
                out.push(b.monic());
            }
            None => out.push(s.monic()),
        },
        _ => return None,
    }
    Some(out)
}

fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Split a quadratic form into two linear forms over Q if possible.
fn split_quadric(s: &Poly, n: usize) -> Option<(Poly, Poly)> {
    let sq = |i: usize| {
        let mut e = vec![0; i + 1];
        e[i] = 2;
        Mono::from_exponents(e)
    };
    let coeff = |m: &Mono| s.terms().find(|(k, _)| *k == m).map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero);
    let vars: Vec<usize> = (0..n).filter(|&i| s.degree_in(i) > 0).collect();
    if let Some(&v) = vars.iter().find(|&&v| !coeff(&sq(v)).is_zero()) {
        // s = a v^2 + b v + c with b linear and c quadratic in the other variables
        let cs = s.coeffs_in(v);
        let a = cs.get(2).and_then(Poly::constant_value)?;
        let b = cs.get(1).cloned().unwrap_or_else(Poly::zero);
        let c = cs.first().cloned().unwrap_or_else(Poly::zero);
        let four_ac = c.scale(&(&a * BigRational::from_integer(4.into())));
        let disc = &(&b * &b) - &four_ac;
        let root = sqrt_quadratic_form(&disc, n)?;
        let two_a = &a * BigRational::from_integer(2.into());
        let inv = two_a.recip();
        let vx = Poly::var(v);
        let r1 = (&(-&b) + &root).scale(&inv);
        let r2 = (&(-&b) - &root).scale(&inv);
        let f1 = &vx - &r1;
        let f2 = &vx - &r2;
        return Some((f1, f2.scale(&a)));
    }
    // no square terms: s is linear in its first variable
    let v = *vars.first()?;
    let cs = s.coeffs_in(v);
    let l = cs.get(1)?.clone();
    let c = cs.first().cloned().unwrap_or_else(Poly::zero);
    if c.is_zero() {
        return Some((Poly::var(v), l));
    }
    let t = c.div_exact(&l)?;
    Some((&Poly::var(v) + &t, l))
}

/// Linear form `L` with `L^2 = q`, if any.
fn sqrt_quadratic_form(q: &Poly, n: usize) -> Option<Poly> {
    if q.is_zero() {
        return Some(Poly::zero());
    }
    let w = (0..n).find(|&i| q.degree_in(i) == 2)?;
    let cs = q.coeffs_in(w);
    let lw = exact_sqrt(&cs[2].constant_value()?)?;
    let cross = cs.get(1).cloned().unwrap_or_else(Poly::zero);
    let two_lw = &lw * BigRational::from_integer(2.into());
    let l = &Poly::var(w).scale(&lw) + &cross.scale(&two_lw.recip());
    if &(&l * &l) == q {
        Some(l)
    } else {
        None
    }
}
