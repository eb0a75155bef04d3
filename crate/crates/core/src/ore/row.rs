use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::coefficients::{CoeffError, Scalar};

use super::multiindex::MultiIndex;

/// A jet coordinate `y^k_mu`. `unknown` is zero-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Jet {
    pub unknown: usize,
    pub mu: MultiIndex,
}

impl Jet {
    pub fn new(unknown: usize, mu: MultiIndex) -> Self {
        Jet { unknown, mu }
    }

    pub fn plain(unknown: usize) -> Self {
        Jet { unknown, mu: MultiIndex::zero() }
    }

    pub fn order(&self) -> u32 {
        self.mu.order()
    }

    pub fn plus(&self, i: usize) -> Jet {
        Jet { unknown: self.unknown, mu: self.mu.plus(i) }
    }
}

// Lower unknown index ranks higher at equal multi-index.
impl Ord for Jet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.mu.cmp(&other.mu).then_with(|| other.unknown.cmp(&self.unknown))
    }
}

impl PartialOrd for Jet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A linear jet expression `sum c_{k,mu} y^k_mu` with coefficients in K.
///
/// Also serves as one row of an operator matrix: the entry in column `k` is
/// `sum_mu c_{k,mu} d_mu`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Row(BTreeMap<Jet, Scalar>);

impl Row {
    pub fn zero() -> Self {
        Row(BTreeMap::new())
    }

    pub fn jet(j: Jet) -> Self {
        Row::term(j, Scalar::one())
    }

    pub fn term(j: Jet, c: Scalar) -> Self {
        let mut r = Row::zero();
        r.add_term(j, c);
        r
    }

    pub fn from_terms<I: IntoIterator<Item = (Jet, Scalar)>>(it: I) -> Self {
        let mut r = Row::zero();
        for (j, c) in it {
            r.add_term(j, c);
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Jet, &Scalar)> {
        self.0.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Jet, Scalar> {
        self.0
    }

    /// Terms strictly below `bound` in the jet order.
    pub fn terms_below<'a>(&'a self, bound: &Jet) -> impl DoubleEndedIterator<Item = (&'a Jet, &'a Scalar)> {
        self.0.range(..bound.clone())
    }

    pub fn coeff(&self, j: &Jet) -> Option<&Scalar> {
        self.0.get(j)
    }

    pub fn leader(&self) -> Option<&Jet> {
        self.0.keys().next_back()
    }

    pub fn leading(&self) -> Option<(&Jet, &Scalar)> {
        self.0.iter().next_back()
    }

    /// Highest derivative order present, `None` for the zero row.
    pub fn order(&self) -> Option<u32> {
        self.0.keys().map(Jet::order).max()
    }

    /// Highest coefficient variable referenced plus one.
    pub fn coeff_span(&self) -> usize {
        self.0.values().map(Scalar::span).max().unwrap_or(0)
    }

    /// Highest derivation axis referenced plus one.
    pub fn axis_span(&self) -> usize {
        self.0.keys().map(|j| j.mu.span()).max().unwrap_or(0)
    }

    pub fn unknowns_span(&self) -> usize {
        self.0.keys().map(|j| j.unknown + 1).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, j: Jet, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(j) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Scalar, other: &Row) {
        if c.is_zero() {
            return;
        }
        for (j, a) in other.terms() {
            self.add_term(j.clone(), c * a);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Row {
        if c.is_zero() {
            return Row::zero();
        }
        Row(self.0.iter().map(|(j, a)| (j.clone(), c * a)).collect())
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Result<Row, CoeffError> {
        match self.leading() {
            None => Ok(Row::zero()),
            Some((_, c)) if c.is_one() => Ok(self.clone()),
            Some((_, c)) => Ok(self.scale(&c.inverse()?)),
        }
    }

    /// Total derivative `d_i` applied to the expression.
    pub fn prolong(&self, i: usize) -> Row {
        let mut out = Row::zero();
        for (j, c) in self.terms() {
            out.add_term(j.plus(i), c.clone());
            let dc = c.derivative(i);
            if !dc.is_zero() {
                out.add_term(j.clone(), dc);
            }
        }
        out
    }

    /// `d_mu` applied to the expression.
    pub fn prolong_by(&self, mu: &MultiIndex) -> Row {
        let mut r = self.clone();
        for a in mu.axes() {
            r = r.prolong(a);
        }
        r
    }

    /// Keep only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Jet) -> bool) -> Row {
        Row(self.0.iter().filter(|(j, _)| keep(j)).map(|(j, c)| (j.clone(), c.clone())).collect())
    }

    /// Apply `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Scalar) -> Result<Scalar, CoeffError>) -> Result<Row, CoeffError> {
        let mut out = Row::zero();
        for (j, c) in self.terms() {
            out.add_term(j.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Substitute jet expressions for the unknowns: `y^k` becomes `exprs[k]`.
    pub fn substitute(&self, exprs: &[Row]) -> Row {
        let mut out = Row::zero();
        let mut cache: BTreeMap<(usize, MultiIndex), Row> = BTreeMap::new();
        for (j, c) in self.terms() {
            let key = (j.unknown, j.mu.clone());
            let d = cache.entry(key).or_insert_with(|| exprs[j.unknown].prolong_by(&j.mu));
            out.axpy(c, d);
        }
        out
    }
}

impl std::ops::Add<&Row> for &Row {
    type Output = Row;
    fn add(self, rhs: &Row) -> Row {
        let mut r = self.clone();
        r.axpy(&Scalar::one(), rhs);
        r
    }
}

impl std::ops::Sub<&Row> for &Row {
    type Output = Row;
    fn sub(self, rhs: &Row) -> Row {
        let mut r = self.clone();
        r.axpy(&Scalar::from_int(-1), rhs);
        r
    }
}

impl std::ops::Neg for &Row {
    type Output = Row;
    fn neg(self) -> Row {
        self.scale(&Scalar::from_int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leibniz_on_coefficient() {
        // d_1 (x1 y) = x1 y_1 + y
        let r = Row::term(Jet::plain(0), Scalar::var(0));
        let p = r.prolong(0);
        let want = Row::from_terms([
            (Jet::new(0, MultiIndex::unit(0)), Scalar::var(0)),
            (Jet::plain(0), Scalar::one()),
        ]);
        assert_eq!(p, want);
    }

    #[test]
    fn lower_unknown_leads_on_ties() {
        let r = Row::from_terms([
            (Jet::new(0, MultiIndex::unit(0)), Scalar::one()),
            (Jet::new(1, MultiIndex::unit(0)), Scalar::var(0)),
        ]);
        assert_eq!(r.leader().unwrap().unknown, 0);
    }
}
