use std::collections::BTreeMap;

use crate::coefficients::{CoeffError, Scalar};
use crate::ore::{Jet, MultiIndex, Row};

/// A jet expression together with an optional cofactor recording how it was
/// obtained from a fixed list of generators (as a row over generator indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TRow {
    pub row: Row,
    pub cof: Option<Row>,
}

impl TRow {
    pub fn new(row: Row, cof: Option<Row>) -> Self {
        TRow { row, cof }
    }

    /// Generator `tau` itself.
    pub fn generator(row: Row, tau: usize, track: bool) -> Self {
        let cof = track.then(|| Row::jet(Jet::plain(tau)));
        TRow { row, cof }
    }

    pub fn prolong(&self, i: usize) -> TRow {
        TRow { row: self.row.prolong(i), cof: self.cof.as_ref().map(|c| c.prolong(i)) }
    }

    pub fn prolong_by(&self, mu: &MultiIndex) -> TRow {
        TRow { row: self.row.prolong_by(mu), cof: self.cof.as_ref().map(|c| c.prolong_by(mu)) }
    }

    pub fn axpy(&mut self, c: &Scalar, other: &TRow) {
        self.row.axpy(c, &other.row);
        if let (Some(a), Some(b)) = (self.cof.as_mut(), other.cof.as_ref()) {
            a.axpy(c, b);
        }
    }

    pub fn scale(&self, c: &Scalar) -> TRow {
        TRow { row: self.row.scale(c), cof: self.cof.as_ref().map(|r| r.scale(c)) }
    }

    pub fn monic(&self) -> Result<TRow, CoeffError> {
        match self.row.leading() {
            None => Ok(self.clone()),
            Some((_, c)) if c.is_one() => Ok(self.clone()),
            Some((_, c)) => Ok(self.scale(&c.inverse()?)),
        }
    }
}

/// Reduced row echelon form over K with respect to the jet order.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<Jet, TRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }

    pub fn from_rows<I: IntoIterator<Item = TRow>>(rows: I) -> Result<Self, CoeffError> {
        let mut e = Echelon::new();
        for r in rows {
            e.insert(r)?;
        }
        Ok(e)
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn contains(&self, j: &Jet) -> bool {
        self.pivots.contains_key(j)
    }

    pub fn get(&self, j: &Jet) -> Option<&TRow> {
        self.pivots.get(j)
    }

    /// Rows in ascending leader order.
    pub fn rows(&self) -> impl DoubleEndedIterator<Item = &TRow> {
        self.pivots.values()
    }

    pub fn leaders(&self) -> impl DoubleEndedIterator<Item = &Jet> {
        self.pivots.keys()
    }

    pub fn into_rows(self) -> Vec<TRow> {
        self.pivots.into_values().collect()
    }

    /// Eliminate every pivot jet from `r`.
    pub fn reduce(&self, mut r: TRow) -> TRow {
        let hits: Vec<(Jet, Scalar)> = r
            .row
            .terms()
            .filter(|(j, _)| self.pivots.contains_key(j))
            .map(|(j, c)| (j.clone(), c.clone()))
            .collect();
        for (j, c) in hits {
            r.axpy(&-&c, &self.pivots[&j]);
        }
        r
    }

    /// Insert a row; returns true when the rank grew.
    pub fn insert(&mut self, r: TRow) -> Result<bool, CoeffError> {
        let r = self.reduce(r);
        if r.row.is_zero() {
            return Ok(false);
        }
        let r = r.monic()?;
        let lead = r.row.leader().expect("nonzero").clone();
        for p in self.pivots.values_mut() {
            if let Some(c) = p.row.coeff(&lead).cloned() {
                p.axpy(&-&c, &r);
            }
        }
        self.pivots.insert(lead, r);
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(axes: &[usize]) -> Jet {
        Jet::new(0, MultiIndex::from_axes(axes))
    }

    #[test]
    fn echelon_is_reduced() {
        let a = Row::from_terms([(j(&[2]), Scalar::one()), (j(&[1]), Scalar::one())]);
        let b = Row::from_terms([(j(&[1]), Scalar::one()), (j(&[0]), Scalar::from_int(2))]);
        let e = Echelon::from_rows([TRow::generator(a, 0, true), TRow::generator(b, 1, true)]).unwrap();
        assert_eq!(e.len(), 2);
        let top = e.get(&j(&[2])).unwrap();
        assert!(top.row.coeff(&j(&[1])).is_none());
        assert_eq!(top.row.coeff(&j(&[0])), Some(&Scalar::from_int(-2)));
        let cof = top.cof.as_ref().unwrap();
        assert_eq!(cof.coeff(&Jet::plain(1)), Some(&Scalar::from_int(-1)));
    }
}
