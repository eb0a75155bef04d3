use crate::coefficients::Scalar;
use crate::ore::{Jet, MultiIndex, OpMatrix, Row};

use super::basis::{complete_with, CompleteOptions, JanetBasis, JetSystem};
use super::JanetError;

/// One relation per (row, non-multiplicative axis), as rows over basis indices.
pub fn basis_compatibility_conditions(b: &JanetBasis) -> OpMatrix {
    let mut out = Vec::new();
    for i in 0..b.len() {
        for a in b.non_multiplicative(i) {
            let (nf, cof) = b.normal_form_tracked(&b.rows()[i].prolong(a), true);
            debug_assert!(nf.is_zero(), "basis is not involutive");
            let mut rel = Row::jet(Jet::new(i, MultiIndex::unit(a)));
            rel.axpy(&Scalar::from_int(-1), &cof.expect("tracked"));
            if !rel.is_zero() {
                out.push(rel);
            }
        }
    }
    OpMatrix::from_rows(b.n, b.len(), out)
}

/// Compatibility conditions of an involutive basis.
pub fn compatibility_conditions(b: &JanetBasis) -> OpMatrix {
    basis_compatibility_conditions(b)
}

#[derive(Clone, Debug)]
pub struct CcOptions {
    pub minimize: bool,
    pub complete: CompleteOptions,
}

impl Default for CcOptions {
    fn default() -> Self {
        CcOptions { minimize: true, complete: CompleteOptions::default() }
    }
}

/// Generators of all relations among the rows of an operator.
#[derive(Debug, Clone)]
pub struct OperatorCc {
    pub generators: OpMatrix,
    pub basis: JanetBasis,
}

fn normalize_relation(r: &Row) -> Row {
    r.monic().unwrap_or_else(|_| r.clone())
}

/// Membership queries against the module generated by a fixed set of rows.
#[derive(Debug)]
pub struct Membership {
    basis: Option<JanetBasis>,
}

impl Membership {
    pub fn new(n: usize, cols: usize, gens: &[Row]) -> Result<Self, JanetError> {
        if gens.iter().all(Row::is_zero) {
            return Ok(Membership { basis: None });
        }
        let sys = JetSystem::new(n, cols, gens.to_vec());
        let b = complete_with(&sys, &CompleteOptions::untracked())?;
        Ok(Membership { basis: Some(b) })
    }

    pub fn basis(&self) -> Option<&JanetBasis> {
        self.basis.as_ref()
    }

    pub fn contains(&self, r: &Row) -> Result<bool, JanetError> {
        Ok(self.reduce(r)?.is_zero())
    }

    /// Normal form of `r` in the original coordinates' basis, zero iff `r` is a member.
    pub fn reduce(&self, r: &Row) -> Result<Row, JanetError> {
        let Some(b) = &self.basis else { return Ok(r.clone()) };
        let r = match b.coordinate_change() {
            Some(c) => c.apply_row(r)?,
            None => r.clone(),
        };
        Ok(b.normal_form(&r))
    }
}

/// True when `r` lies in the module generated by `gens` (rows over `cols` unknowns).
pub fn in_module(n: usize, cols: usize, gens: &[Row], r: &Row) -> Result<bool, JanetError> {
    if r.is_zero() {
        return Ok(true);
    }
    Membership::new(n, cols, gens)?.contains(r)
}

/// True when both row sets generate the same module.
pub fn same_module(n: usize, cols: usize, a: &[Row], b: &[Row]) -> Result<bool, JanetError> {
    let ma = Membership::new(n, cols, a)?;
    let mb = Membership::new(n, cols, b)?;
    for r in a {
        if !mb.contains(r)? {
            return Ok(false);
        }
    }
    for r in b {
        if !ma.contains(r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Drop generators that lie in the module generated by the others.
pub fn minimize_generators(n: usize, cols: usize, rows: Vec<Row>) -> Result<Vec<Row>, JanetError> {
    let mut keep = rows;
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(keep[i].order()), std::cmp::Reverse(keep[i].len())));
    let mut alive = vec![true; keep.len()];
    for i in order {
        let others: Vec<Row> = (0..keep.len()).filter(|&j| j != i && alive[j]).map(|j| keep[j].clone()).collect();
        if in_module(n, cols, &others, &keep[i])? {
            alive[i] = false;
        }
    }
    let mut out = Vec::new();
    for (i, r) in keep.drain(..).enumerate() {
        if alive[i] {
            out.push(r);
        }
    }
    Ok(out)
}

/// All relations `D1` with `D1 . A = 0`.
pub fn operator_cc(a: &OpMatrix, opts: &CcOptions) -> Result<OperatorCc, JanetError> {
    let sys = JetSystem::from_matrix(a);
    let mut copts = opts.complete.clone();
    copts.track = true;
    let b = complete_with(&sys, &copts)?;
    let t = b.cofactors().ok_or(JanetError::Untracked)?;
    let cb = basis_compatibility_conditions(&b);
    let mut gens: Vec<Row> = Vec::new();
    for rel in cb.rows() {
        gens.push(rel.substitute(t));
    }
    for (tau, eq) in b.input().equations.iter().enumerate() {
        let (nf, s) = b.normal_form_tracked(eq, true);
        debug_assert!(nf.is_zero());
        let mut rel = Row::jet(Jet::plain(tau));
        rel.axpy(&Scalar::from_int(-1), &s.expect("tracked").substitute(t));
        gens.push(rel);
    }
    if let Some(c) = b.coordinate_change() {
        let back = c.inverse();
        gens = gens.iter().map(|g| back.apply_row(g)).collect::<Result<_, _>>()?;
    }
    let mut clean: Vec<Row> = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        let g = normalize_relation(&g);
        if !clean.contains(&g) {
            clean.push(g);
        }
    }
    if opts.minimize {
        clean = minimize_generators(a.nder(), a.nrows(), clean)?;
    }
    Ok(OperatorCc { generators: OpMatrix::from_rows(a.nder(), a.nrows(), clean), basis: b })
}

/// Chain `D, D1, D2, ...` with `D_{i+1} D_i = 0`, each generating the relations of the previous.
#[derive(Debug, Clone)]
pub struct FreeResolution {
    pub maps: Vec<OpMatrix>,
    pub ranks: Vec<usize>,
    pub euler_poincare: i64,
}

pub fn free_resolution(sys: &JetSystem) -> Result<FreeResolution, JanetError> {
    let b = complete_with(sys, &CompleteOptions::default())?;
    let mut d0 = b.as_matrix();
    if let Some(c) = b.coordinate_change() {
        let back = c.inverse();
        d0 = OpMatrix::from_rows(sys.n, sys.m, d0.rows().iter().map(|r| back.apply_row(r)).collect::<Result<_, _>>()?);
    }
    resolve_from(d0, sys.m)
}

/// Resolution starting from a given presentation matrix.
pub fn resolve_from(d0: OpMatrix, m: usize) -> Result<FreeResolution, JanetError> {
    let mut maps = vec![d0];
    let opts = CcOptions { minimize: false, ..CcOptions::default() };
    loop {
        let last = maps.last().expect("nonempty");
        if last.nrows() == 0 || maps.len() > last.nder() + 2 {
            break;
        }
        let cc = operator_cc(last, &opts)?.generators;
        if cc.nrows() == 0 {
            break;
        }
        maps.push(cc);
    }
    let mut ranks = vec![m];
    ranks.extend(maps.iter().map(OpMatrix::nrows).filter(|&r| r > 0));
    let euler_poincare = ranks.iter().enumerate().map(|(i, &r)| if i % 2 == 0 { r as i64 } else { -(r as i64) }).sum();
    Ok(FreeResolution { maps, ranks, euler_poincare })
}
