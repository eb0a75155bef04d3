use std::collections::BTreeMap;

use crate::coefficients::Scalar;

use super::multiindex::MultiIndex;
use super::row::{Jet, Row};
use super::OreError;

/// A scalar operator `sum a^mu d_mu` with coefficients on the left.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ScalarOp(BTreeMap<MultiIndex, Scalar>);

impl ScalarOp {
    pub fn zero() -> Self {
        ScalarOp(BTreeMap::new())
    }

    pub fn one() -> Self {
        ScalarOp::coeff(Scalar::one())
    }

    pub fn coeff(a: Scalar) -> Self {
        ScalarOp::term(MultiIndex::zero(), a)
    }

    /// The derivation `d_{i+1}`.
    pub fn d(i: usize) -> Self {
        ScalarOp::term(MultiIndex::unit(i), Scalar::one())
    }

    pub fn term(mu: MultiIndex, a: Scalar) -> Self {
        let mut m = BTreeMap::new();
        if !a.is_zero() {
            m.insert(mu, a);
        }
        ScalarOp(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Scalar)> {
        self.0.iter()
    }

    pub fn order(&self) -> Option<u32> {
        self.0.keys().map(MultiIndex::order).max()
    }

    /// View as a jet expression in a single unknown with index `k`.
    pub fn as_row(&self, k: usize) -> Row {
        Row::from_terms(self.0.iter().map(|(m, a)| (Jet::new(k, m.clone()), a.clone())))
    }

    /// Collect the coefficients of unknown `k` in a jet expression.
    pub fn from_row(r: &Row, k: usize) -> Self {
        ScalarOp(
            r.terms()
                .filter(|(j, _)| j.unknown == k)
                .map(|(j, a)| (j.mu.clone(), a.clone()))
                .collect(),
        )
    }

    /// Apply the operator to a jet expression.
    pub fn apply(&self, r: &Row) -> Row {
        let mut out = Row::zero();
        for (mu, a) in self.terms() {
            out.axpy(a, &r.prolong_by(mu));
        }
        out
    }

    /// Formal adjoint `sum (-1)^|mu| d_mu a^mu`, in coefficient-left form.
    pub fn adjoint(&self) -> ScalarOp {
        let mut out = Row::zero();
        for (mu, a) in self.terms() {
            let t = Row::term(Jet::plain(0), a.clone()).prolong_by(mu);
            let s = if mu.order() % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
            out.axpy(&s, &t);
        }
        ScalarOp::from_row(&out, 0)
    }

    pub fn scale(&self, c: &Scalar) -> ScalarOp {
        ScalarOp::from_row(&self.as_row(0).scale(c), 0)
    }
}

/// Product `P o Q` normalised to coefficient-left form.
pub fn compose(p: &ScalarOp, q: &ScalarOp) -> ScalarOp {
    ScalarOp::from_row(&p.apply(&q.as_row(0)), 0)
}

impl std::ops::Add<&ScalarOp> for &ScalarOp {
    type Output = ScalarOp;
    fn add(self, rhs: &ScalarOp) -> ScalarOp {
        ScalarOp::from_row(&(&self.as_row(0) + &rhs.as_row(0)), 0)
    }
}

impl std::ops::Sub<&ScalarOp> for &ScalarOp {
    type Output = ScalarOp;
    fn sub(self, rhs: &ScalarOp) -> ScalarOp {
        ScalarOp::from_row(&(&self.as_row(0) - &rhs.as_row(0)), 0)
    }
}

/// A `p x m` operator matrix; row `tau` is the equation `Phi^tau`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OpMatrix {
    nder: usize,
    cols: usize,
    rows: Vec<Row>,
}

impl OpMatrix {
    pub fn from_rows(nder: usize, cols: usize, rows: Vec<Row>) -> Self {
        debug_assert!(rows.iter().all(|r| r.unknowns_span() <= cols));
        OpMatrix { nder, cols, rows }
    }

    pub fn from_entries(nder: usize, cols: usize, entries: Vec<Vec<ScalarOp>>) -> Self {
        let rows = entries
            .into_iter()
            .map(|e| {
                let mut r = Row::zero();
                for (k, op) in e.iter().enumerate() {
                    r.axpy(&Scalar::one(), &op.as_row(k));
                }
                r
            })
            .collect();
        OpMatrix { nder, cols, rows }
    }

    pub fn identity(nder: usize, m: usize) -> Self {
        OpMatrix { nder, cols: m, rows: (0..m).map(|k| Row::jet(Jet::plain(k))).collect() }
    }

    pub fn zero(nder: usize, p: usize, m: usize) -> Self {
        OpMatrix { nder, cols: m, rows: vec![Row::zero(); p] }
    }

    pub fn nder(&self) -> usize {
        self.nder
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Row> {
        self.rows
    }

    pub fn row(&self, tau: usize) -> &Row {
        &self.rows[tau]
    }

    pub fn entry(&self, tau: usize, k: usize) -> ScalarOp {
        ScalarOp::from_row(&self.rows[tau], k)
    }

    pub fn order(&self) -> Option<u32> {
        self.rows.iter().filter_map(Row::order).max()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Row::is_zero)
    }

    /// Drop identically zero rows.
    pub fn without_zero_rows(&self) -> OpMatrix {
        OpMatrix {
            nder: self.nder,
            cols: self.cols,
            rows: self.rows.iter().filter(|r| !r.is_zero()).cloned().collect(),
        }
    }

    pub fn stack(&self, other: &OpMatrix) -> Result<OpMatrix, OreError> {
        if self.cols != other.cols {
            return Err(OreError::Shape);
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(OpMatrix { nder: self.nder.max(other.nder), cols: self.cols, rows })
    }

    /// Apply every row to the column of expressions `exprs`.
    pub fn apply(&self, exprs: &[Row]) -> Result<Vec<Row>, OreError> {
        if exprs.len() != self.cols {
            return Err(OreError::Shape);
        }
        Ok(self.rows.iter().map(|r| r.substitute(exprs)).collect())
    }

    /// The `m x p` formal adjoint.
    pub fn adjoint(&self) -> OpMatrix {
        let p = self.rows.len();
        let mut out = vec![Row::zero(); self.cols];
        for (tau, r) in self.rows.iter().enumerate() {
            for k in 0..self.cols {
                let e = ScalarOp::from_row(r, k);
                if e.is_zero() {
                    continue;
                }
                out[k].axpy(&Scalar::one(), &e.adjoint().as_row(tau));
            }
        }
        OpMatrix { nder: self.nder, cols: p, rows: out }
    }
}

/// Matrix product `A B`, so that `(v A) B = v (A B)`.
pub fn matrix_compose(a: &OpMatrix, b: &OpMatrix) -> Result<OpMatrix, OreError> {
    if a.ncols() != b.nrows() {
        return Err(OreError::Shape);
    }
    let rows = a.apply(b.rows())?;
    Ok(OpMatrix { nder: a.nder.max(b.nder), cols: b.cols, rows })
}
